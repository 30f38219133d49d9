"""Command-line front end: patch tests, single beam runs, convergence
studies with CSV/SVG artifacts, and a shape-function demo.

Exit codes: 0 on success, 1 on a numerical failure, 2 on usage errors.
The output directory defaults to $SFEM2D_OUTPUT_DIR, then ./sfem2d-out.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from . import benchmarks as bench
from .errors import SfemError
from .shapefn import (
    SCHEMES,
    build_lagrange,
    build_wachspress,
    eval_lagrange,
    eval_wachspress,
)
from .smoothing import default_quadrature
from .svgplot import write_loglog_svg

PARALLELOGRAM = ((0.0, 0.0), (1.0, 0.0), (1.5, 1.0), (0.5, 1.0))
UNIT_SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


@dataclass
class RunConfig:
    command: str
    scheme: list = field(default_factory=lambda: ["wachspress"])
    k_cells: int = 4
    alpha_ir: float = 0.0
    seed: int = 0
    num_seeds: int = 1
    mesh_index: float = 4.0
    mesh_indices: list = field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    quadrature: int | None = None
    split: str = "12-34"
    output_dir: str = ""
    quad: tuple = PARALLELOGRAM
    point: tuple = (0.25, 0.5)

    def validate(self):
        for s in self.scheme:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if self.k_cells not in (1, 2, 4):
            raise ValueError("k must be 1, 2 or 4")
        if not 0.0 <= self.alpha_ir <= 0.5:
            raise ValueError("alpha must be in [0, 0.5]")
        if self.quadrature is not None and self.quadrature not in (1, 2, 3, 4):
            raise ValueError("quadrature must be 1..4")
        if self.mesh_indices != sorted(self.mesh_indices):
            raise ValueError("mesh indices must be ascending")


def _default_output_dir():
    return os.environ.get("SFEM2D_OUTPUT_DIR", "sfem2d-out")


def _parse_quad(text):
    if text == "parallelogram":
        return PARALLELOGRAM
    if text == "unit-square":
        return UNIT_SQUARE
    vals = [float(t) for t in text.split(",")]
    if len(vals) != 8:
        raise argparse.ArgumentTypeError(
            "quad must be 'parallelogram', 'unit-square', or 8 floats "
            "x1,y1,...,x4,y4"
        )
    return tuple((vals[2 * i], vals[2 * i + 1]) for i in range(4))


def _parse_point(text):
    vals = [float(t) for t in text.split(",")]
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("point must be 'x,y'")
    return tuple(vals)


def _parse_indices(text):
    return [float(t) for t in text.split(",")]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sfem2d",
        description="Smoothed quad finite elements: benchmarks and demos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schemes_many=False):
        if schemes_many:
            p.add_argument("--scheme", default="wachspress,averaged",
                           help="comma-separated schemes (default both "
                                "wachspress and averaged)")
        else:
            p.add_argument("--scheme", default="wachspress", choices=SCHEMES)
        p.add_argument("--k", type=int, default=4, choices=(1, 2, 4),
                       help="smoothing cells per element")
        p.add_argument("--quadrature", type=int, default=None,
                       choices=(1, 2, 3, 4),
                       help="Gauss points per boundary segment")
        p.add_argument("--split", default="12-34", choices=("12-34", "23-41"),
                       help="bimedian used by the two-cell subdivision")

    p = sub.add_parser("patch-test", help="linear patch test")
    common(p)
    p.add_argument("--alpha", type=float, default=0.0,
                   help="mesh irregularity; 0 runs the regular 2x2 patch, "
                        ">0 the distorted 3x3 one")
    p.add_argument("--seed", type=int, default=3)

    p = sub.add_parser("beam", help="one cantilever solve")
    common(p)
    p.add_argument("--mesh-index", type=float, default=4.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("convergence", help="mesh-sequence study with CSV/SVG")
    common(p, schemes_many=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--seeds", type=int, default=1,
                   help="number of seeds (0, 1, ..., n-1) for irregular runs")
    p.add_argument("--mesh-indices", type=_parse_indices,
                   default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("shapefn-demo",
                       help="print shape-function values at a point")
    p.add_argument("--quad", type=_parse_quad, default=PARALLELOGRAM)
    p.add_argument("--point", type=_parse_point, default=(0.25, 0.5))

    return parser


def config_from_args(args):
    cfg = RunConfig(command=args.command)
    if args.command != "shapefn-demo":
        cfg.scheme = args.scheme.split(",") if "," in args.scheme else [args.scheme]
        cfg.k_cells = args.k
        cfg.quadrature = args.quadrature
        cfg.split = args.split
    if args.command in ("patch-test", "beam", "convergence"):
        cfg.alpha_ir = args.alpha
    if args.command in ("patch-test", "beam"):
        cfg.seed = args.seed
    if args.command == "beam":
        cfg.mesh_index = args.mesh_index
    if args.command == "convergence":
        cfg.num_seeds = args.seeds
        cfg.mesh_indices = args.mesh_indices
        cfg.output_dir = args.output_dir or _default_output_dir()
    if args.command == "shapefn-demo":
        cfg.quad = args.quad
        cfg.point = args.point
    cfg.validate()
    return cfg


def cmd_patch_test(cfg):
    scheme = cfg.scheme[0]
    distorted = cfg.alpha_ir > 0.0
    err = bench.run_patch_test(scheme, cfg.k_cells, distorted=distorted,
                               seed=cfg.seed, quadrature=cfg.quadrature,
                               split=cfg.split)
    bound = 1e-9 if distorted else 1e-10
    kind = "distorted 3x3" if distorted else "regular 2x2"
    ok = err < bound
    print(f"patch test ({kind}, scheme={scheme}, k={cfg.k_cells}): "
          f"max interior error {err:.3e} (bound {bound:.0e}) "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_beam(cfg):
    scheme = cfg.scheme[0]
    beam = bench.TimoshenkoBeam()
    exact = bench.exact_strain_energy(beam)
    mesh, sol = bench.solve_beam(beam, cfg.mesh_index, scheme, cfg.k_cells,
                                 alpha_ir=cfg.alpha_ir, seed=cfg.seed,
                                 quadrature=cfg.quadrature, split=cfg.split)
    err = bench.energy_norm_error(mesh, sol.u, beam, scheme, cfg.k_cells,
                                  quadrature=cfg.quadrature, split=cfg.split)
    rel = abs(sol.strain_energy - exact) / exact
    print(f"beam: scheme={scheme} k={cfg.k_cells} mesh_index={cfg.mesh_index:g} "
          f"alpha={cfg.alpha_ir:g} seed={cfg.seed}")
    print(f"  dofs:               {2 * mesh.num_nodes}")
    print(f"  strain energy:      {sol.strain_energy:.10g}")
    print(f"  exact energy:       {exact:.10g}  (rel. diff {rel:.3e})")
    print(f"  energy-norm error:  {err:.10g}")
    return 0


def _meta_text(cfg, seeds):
    q = {s: (cfg.quadrature or default_quadrature(s)) for s in cfg.scheme}
    lines = [
        "sfem2d convergence study settings",
        f"schemes: {','.join(cfg.scheme)}",
        f"smoothing cells per element (k): {cfg.k_cells}",
        f"two-cell split bimedian: {cfg.split} "
        "(midpoints of those local edges)",
        f"boundary quadrature points per segment: "
        + ", ".join(f"{s}={q[s]}" for s in cfg.scheme),
        "essential BC: exact cantilever displacements on the clamped "
        "section (both components)",
        "end load: consistent nodal forces of the parabolic shear, "
        "2-point Gauss per edge",
        f"alpha_ir: {cfg.alpha_ir:g}",
        f"seeds: {','.join(str(s) for s in seeds)}",
        "rng: numpy PCG64 (default_rng), draws node-major, x before y, "
        "interior nodes only",
        f"mesh indices: {','.join(f'{m:g}' for m in cfg.mesh_indices)}",
        "energy norm: no 1/2 factor inside the error integrand",
        "strain energy: 0.5 u^T K u including prescribed DOFs",
    ]
    return "\n".join(lines) + "\n"


def cmd_convergence(cfg):
    os.makedirs(cfg.output_dir, exist_ok=True)
    seeds = tuple(range(cfg.num_seeds))
    all_records = []
    series = []
    annotations = []
    for scheme in cfg.scheme:
        study = bench.run_convergence_study(
            scheme, cfg.k_cells, alpha_ir=cfg.alpha_ir, seeds=seeds,
            mesh_indices=cfg.mesh_indices, quadrature=cfg.quadrature,
            split=cfg.split,
        )
        all_records.extend(study.records)
        xs = sorted({r.mesh_index for r in study.records})
        ys = [median([r.energy_norm_error for r in study.records
                      if r.mesh_index == mi]) for mi in xs]
        series.append((f"{scheme} (SC{cfg.k_cells}Q4)", xs, ys))
        annotations.append(
            f"{scheme}: slope {study.fit.slope:.3f}, "
            f"r^2 {study.fit.r_squared:.4f}"
        )
        print(f"{scheme}: rate {study.fit.slope:.4f} "
              f"(r^2 {study.fit.r_squared:.5f}), "
              f"finest energy {study.records[-1].strain_energy:.8g}")
    csv_path = os.path.join(cfg.output_dir, "convergence.csv")
    bench.write_records_csv(all_records, csv_path)
    svg_path = os.path.join(cfg.output_dir, "convergence.svg")
    write_loglog_svg(
        svg_path, series, xlabel="mesh index", ylabel="energy-norm error",
        title=f"SC{cfg.k_cells}Q4 cantilever, alpha={cfg.alpha_ir:g}",
        annotations=annotations,
    )
    meta_path = os.path.join(cfg.output_dir, "meta.txt")
    with open(meta_path, "w", encoding="ascii") as fh:
        fh.write(_meta_text(cfg, seeds))
    print(f"wrote {csv_path}, {svg_path}, {meta_path}")
    return 0


def cmd_shapefn_demo(cfg):
    quad = np.array(cfg.quad, dtype=float)
    point = np.array(cfg.point, dtype=float)
    wach = eval_wachspress(build_wachspress(quad), point)
    try:
        lagr = eval_lagrange(build_lagrange(quad), point)
        lagr_txt = [f"{v: .10g}" for v in lagr]
    except SfemError as err:
        lagr_txt = [f"({err})"] * 4
    print(f"shape functions at ({point[0]:g}, {point[1]:g}):")
    print(f"  {'node':>4} {'wachspress':>14} {'lagrange':>14}")
    for i in range(4):
        print(f"  {i + 1:>4} {wach[i]: 14.10g} {lagr_txt[i]:>14}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as err:
        parser.error(str(err))  # exits 2
    handlers = {
        "patch-test": cmd_patch_test,
        "beam": cmd_beam,
        "convergence": cmd_convergence,
        "shapefn-demo": cmd_shapefn_demo,
    }
    try:
        return handlers[cfg.command](cfg)
    except SfemError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
