"""Write a smooth layered media raster in the ELMEDIA1 format.

    python scripts/make_synthetic_raster.py configs/layered.media --width 400 --height 400
"""

import argparse

from sbpsat.domain import layered_raster, write_raster


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("path")
    parser.add_argument("--width", type=float, default=400.0)
    parser.add_argument("--height", type=float, default=400.0)
    parser.add_argument("--spacing", type=float, default=8.0, help="raster node spacing (m)")
    parser.add_argument("--y0", type=float, default=0.0, help="ordinate of the bottom row (m)")
    args = parser.parse_args()
    raster = layered_raster(args.width, args.height, args.spacing, args.y0)
    write_raster(args.path, raster)
    print(f"wrote {args.path}: {raster.nx}x{raster.ny} nodes, "
          f"cp {raster.cp.min():.0f}..{raster.cp.max():.0f} m/s")


if __name__ == "__main__":
    main()
