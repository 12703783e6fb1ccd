import argparse

from gfdmlab.config import settings
from gfdmlab.core.pointcloud.generator import generate_cloud
from gfdmlab.core.pointcloud.io import save_cloud
from gfdmlab.core.voronoi.diagram import compute_voronoi
from gfdmlab.core.voronoi.io import save_faces, save_volumes


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen", help="Generate a point cloud on the unit square")
    parser.add_argument("--h", type=float, required=True, help="Target smoothing length")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--out", required=True, help="Cloud CSV path")
    parser.add_argument(
        "--voronoi-out",
        default=None,
        metavar="PREFIX",
        help="Also write PREFIX_volumes.csv and PREFIX_faces.csv",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cloud = generate_cloud(args.h, args.seed)
    save_cloud(cloud, args.out)
    if args.voronoi_out:
        diagram = compute_voronoi(cloud)
        save_volumes(diagram, f"{args.voronoi_out}_volumes.csv")
        save_faces(diagram, f"{args.voronoi_out}_faces.csv")
    print(f"N={cloud.n_points} boundary={int(cloud.is_boundary.sum())}")
    return 0
