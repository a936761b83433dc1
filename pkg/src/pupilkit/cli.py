"""Command-line front end.

Subcommands: detect (per-frame records), stream (windowed best-frame
reports from a stdin frame list), eval (dataset metrics), synth (generate
a ground-truthed synthetic dataset) and maskdump (render a mask grid).

Output is CSV by default (one header line, RFC-4180) or JSON lines with
--format jsonl. Records are emitted in input order regardless of the
worker count, so runs are byte-identical for any --workers value. Config
precedence: flags > --config key=value file > built-in defaults.

Exit codes: 0 ok, 2 bad usage, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import sys
from pathlib import Path

from . import evaluation as ev
from . import synth as sy
from .errors import (EmptyDataset, NoPupilContrast, NoValidCandidate,
                     OutOfBounds, PupilkitError, UnreadableFile)
from .image import EyeRegion, load_frame
from .iris import detect_iris
from .masks import build_mask, render_mask_text
from .pipeline import RunConfig, analyze_frame
from .pupil import detect_pupil
from .selector import BestFrameState, reset, update_best

IMAGE_SUFFIXES = (".pgm", ".png", ".bmp")

DETECT_FIELDS = ["frame_id"]
for _side in ("left", "right"):
    DETECT_FIELDS += [f"{_side}_{k}" for k in
                      ("ex", "ey", "er", "l", "s", "h", "c",
                       "px", "py", "pr", "g")]
DETECT_FIELDS.append("confidence")

STREAM_FIELDS = ["window_id", "best_frame_id", "confidence",
                 "left_pr", "right_pr", "disp_radius", "disp_ey", "disp_py",
                 "disp_pr", "no_confident_frame"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Emitter:
    """Writes records as CSV rows or JSON lines, in input order."""

    def __init__(self, fields: list[str], fmt: str, out=None):
        self.fields = fields
        self.fmt = fmt
        self.out = out or sys.stdout
        self._csv = None
        if fmt == "csv":
            self._csv = csv.writer(self.out, lineterminator="\n")
            self._csv.writerow(fields)

    def emit(self, record: dict) -> None:
        if self.fmt == "csv":
            self._csv.writerow([_fmt(record.get(f)) for f in self.fields])
        else:
            line = {k: record.get(k) for k in self.fields
                    if record.get(k) is not None}
            self.out.write(json.dumps(line, sort_keys=True) + "\n")


def _iris_record(prefix: str, iris) -> dict:
    if iris is None:
        return {}
    return {f"{prefix}_ex": iris.ex, f"{prefix}_ey": iris.ey,
            f"{prefix}_er": iris.er, f"{prefix}_l": iris.l,
            f"{prefix}_s": iris.s, f"{prefix}_h": iris.h,
            f"{prefix}_c": iris.c}


def _pupil_record(prefix: str, pupil) -> dict:
    if pupil is None:
        return {}
    return {f"{prefix}_px": pupil.px, f"{prefix}_py": pupil.py,
            f"{prefix}_pr": pupil.pr, f"{prefix}_g": pupil.g}


def result_record(frame_id: str, result) -> dict:
    record = {"frame_id": frame_id, "confidence": result.confidence}
    record.update(_iris_record("left", result.left))
    record.update(_pupil_record("left", result.left_pupil))
    record.update(_iris_record("right", result.right))
    record.update(_pupil_record("right", result.right_pupil))
    return record


def list_input_frames(path: str | Path, frame_stride: int = 1) -> list[Path]:
    path = Path(path)
    if path.is_dir():
        frames = sorted(p for p in path.iterdir()
                        if p.suffix.lower() in IMAGE_SUFFIXES)
        if not frames:
            raise EmptyDataset(f"{path}: no frame images found")
        return frames[::frame_stride]
    if not path.exists():
        raise UnreadableFile(f"{path}: no such file")
    return [path]


def _frame_task(args) -> tuple[str, object]:
    """Worker: load one frame, build its rois and run the detectors."""
    path_str, frame_index, cfg, file_rois = args
    path = Path(path_str)
    frame = load_frame(path, frame_index=frame_index)
    if file_rois is not None:
        table = {(path.stem, side): box for side, box in file_rois.items()}
        left, right = ev.roi_provider(
            ev.EyeAnnotation(0, 0, 1, 1), frame.width, frame.height,
            mode="file", pad=cfg.roi_pad, sample_id=path.stem,
            roi_table=table)
    else:
        eye_path = path.with_suffix(".eye")
        if not eye_path.exists():
            raise EmptyDataset(
                f"{path}: no roi source (no .eye sidecar; use --roi-file)")
        lx, ly, rx, ry = ev.parse_eye_file(eye_path)
        ann = ev.EyeAnnotation(lx=lx, ly=ly, rx=rx, ry=ry)
        left, right = ev.roi_provider(
            ann, frame.width, frame.height, mode=cfg.roi_mode,
            pad=cfg.roi_pad, jitter_seed=cfg.jitter_seed,
            sample_id=path.stem)
    return path.stem, analyze_frame(frame, left, right, cfg)


def _map_tasks(tasks, workers: int):
    """Run frame tasks preserving input order."""
    if workers <= 1:
        for task in tasks:
            yield _frame_task(task)
        return
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_frame_task, tasks, chunksize=4)


def _load_file_rois(roi_file: str | None, cfg: RunConfig):
    """Per-sample roi boxes from --roi-file, or None for sidecar mode."""
    if cfg.roi_mode != "file":
        return None
    if not roi_file:
        raise EmptyDataset("--roi-mode file needs --roi-file")
    table = ev.load_roi_file(roi_file)
    by_sample: dict[str, dict[str, tuple]] = {}
    for (sample, side), box in table.items():
        by_sample.setdefault(sample, {})[side] = box
    return by_sample


def _tasks_for(frames: list[Path], cfg: RunConfig, roi_by_sample):
    tasks = []
    for index, path in enumerate(frames):
        rois = None if roi_by_sample is None else roi_by_sample.get(path.stem)
        if roi_by_sample is not None and rois is None:
            raise EmptyDataset(f"{path.stem}: not present in --roi-file")
        tasks.append((str(path), index, cfg, rois))
    return tasks


def cmd_detect(args, cfg: RunConfig) -> int:
    frames = list_input_frames(args.input, cfg.frame_stride)
    roi_by_sample = _load_file_rois(args.roi_file, cfg)
    emitter = Emitter(DETECT_FIELDS, cfg.fmt)
    for frame_id, result in _map_tasks(_tasks_for(frames, cfg, roi_by_sample),
                                       cfg.workers):
        emitter.emit(result_record(frame_id, result))
    return 0


def _window_record(window_id: int, state: BestFrameState,
                   frame_ids: dict[int, str]) -> dict:
    best = state.best
    record = {"window_id": window_id, "no_confident_frame": 0}
    if best is None or best.confidence <= 0:
        record["no_confident_frame"] = 1
        record["confidence"] = 0.0
        return record
    record["best_frame_id"] = frame_ids[best.frame_index]
    record["confidence"] = best.confidence
    if best.left_pupil is not None:
        record["left_pr"] = best.left_pupil.pr
    if best.right_pupil is not None:
        record["right_pr"] = best.right_pupil.pr
    record.update({"disp_radius": best.disp_radius, "disp_ey": best.disp_ey,
                   "disp_py": best.disp_py, "disp_pr": best.disp_pr})
    return record


def cmd_stream(args, cfg: RunConfig) -> int:
    lines = [ln.strip() for ln in sys.stdin if ln.strip()]
    roi_by_sample = _load_file_rois(args.roi_file, cfg)
    paths = [ln for ln in lines if ln != "RESET"]
    tasks = _tasks_for([Path(p) for p in paths], cfg, roi_by_sample)
    results = iter(_map_tasks(tasks, cfg.workers))

    emitter = Emitter(STREAM_FIELDS, cfg.fmt)
    state = BestFrameState(window_length=cfg.window)
    frame_ids: dict[int, str] = {}
    window_id = 0
    in_window = 0
    frame_index = 0

    def close_window():
        nonlocal window_id, in_window
        emitter.emit(_window_record(window_id, state, frame_ids))
        reset(state, window_start=frame_index)
        window_id += 1
        in_window = 0

    for line in lines:
        if line == "RESET":
            if in_window:
                close_window()
            continue
        frame_id, result = next(results)
        frame_ids[result.frame_index] = frame_id
        update_best(state, result)
        frame_index += 1
        in_window += 1
        if in_window >= cfg.window:
            close_window()
    if in_window:
        close_window()
    return 0


def _print_report(rows: list[tuple], fmt: str) -> None:
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["metric", "value", "reference"])
        for metric, value, reference in rows:
            writer.writerow([metric, _fmt(value), _fmt(reference)])
    else:
        for metric, value, reference in rows:
            line = {"metric": metric, "value": value}
            if reference is not None:
                line["reference"] = reference
            sys.stdout.write(json.dumps(line, sort_keys=True) + "\n")


def eval_bioid(dataset: Path, cfg: RunConfig) -> list[tuple]:
    pairs, unpaired = ev.list_bioid_pairs(dataset)
    if not pairs:
        raise EmptyDataset(f"{dataset}: no paired .pgm/.eye samples")
    for stem in unpaired:
        print(f"warning: unpaired sample {stem} skipped", file=sys.stderr)

    tasks = [(str(img), i, cfg, None) for i, (_, img, _) in enumerate(pairs)]
    annotations = {stem: ev.parse_eye_file(eye) for stem, _, eye in pairs}

    records = []
    baseline = []
    for (stem, img_path, _), (frame_id, result) in zip(
            pairs, _map_tasks(tasks, cfg.workers)):
        lx, ly, rx, ry = annotations[stem]
        ann = ev.EyeAnnotation(lx=lx, ly=ly, rx=rx, ry=ry)
        if result.left is None or result.right is None:
            records.append(ev.EvalRecord(sample_id=stem, e_l=1.0, e_r=1.0,
                                         e=1.0))
        else:
            e_l, e_r, e = ev.relative_errors(
                (result.left.ex, result.left.ey),
                (result.right.ex, result.right.ey), ann)
            records.append(ev.EvalRecord(sample_id=stem, e_l=e_l, e_r=e_r, e=e))
        # substitute rough baseline: eye-box centers as detections
        base_l, base_r = ev.baseline_centers(ann, cfg.roi_mode,
                                             cfg.jitter_seed, stem)
        b_l, b_r, b_e = ev.relative_errors(base_l, base_r, ann)
        baseline.append(ev.EvalRecord(sample_id=stem, e_l=b_l, e_r=b_r, e=b_e))

    e_l, e_r, e = ev.aggregate_errors(records)
    rows = [("samples", len(records), None),
            ("E_l", e_l, ev.REFERENCE_BIOID_ERRORS["E_l"]),
            ("E_r", e_r, ev.REFERENCE_BIOID_ERRORS["E_r"]),
            ("E", e, ev.REFERENCE_BIOID_ERRORS["E"])]
    for t in cfg.tolerances:
        rows.append((f"A_{t:g}", ev.tolerance_accuracy(records, t),
                     ev.REFERENCE_BIOID_ACCURACY.get(t)))
    b_l, b_r, b_e = ev.aggregate_errors(baseline)
    rows += [("baseline_E_l", b_l, ev.REFERENCE_BIOID_BASELINE["E_l"]),
             ("baseline_E_r", b_r, ev.REFERENCE_BIOID_BASELINE["E_r"]),
             ("baseline_E", b_e, ev.REFERENCE_BIOID_BASELINE["E"])]
    for t in cfg.tolerances:
        rows.append((f"baseline_A_{t:g}", ev.tolerance_accuracy(baseline, t),
                     ev.REFERENCE_BIOID_BASELINE_ACCURACY.get(t)))
    return rows


def synth_roi(cx: int, cy: int, iris_r: int, frame, jitter_seed: int,
              sample_id: str) -> EyeRegion:
    """Jittered eye box around a synthetic eye, sized from its iris.

    The box is proportioned like a detector-provided eye box (iris radius
    about a fifth of the box width), so the default radius policy covers
    the true radius.
    """
    side = max(15, round(5.0 * iris_r))
    rng = ev._sample_rng(jitter_seed, sample_id)
    jx, jy = (int(v) for v in rng.integers(-3, 4, size=2))
    x, y, w, h, clipped = ev._fit_box(cx + jx, cy + jy, side,
                                      frame.width, frame.height)
    return EyeRegion(x=x, y=y, w=w, h=h, side="left", clipped=clipped)


def eval_synth_manifest(manifest: Path, cfg: RunConfig) -> list[tuple]:
    if manifest.is_dir():
        manifest = manifest / "manifest.csv"
    rows_in = sy.read_manifest(manifest)
    if not rows_in:
        raise EmptyDataset(f"{manifest}: empty manifest")
    base = manifest.parent

    n = len(rows_in)
    center_hist: dict[int, int] = {}
    radius_hist: dict[int, int] = {}
    pupil_exact = 0
    pupil_within_1 = 0
    prf_sums = [0.0, 0.0, 0.0]
    prf_count = 0
    diam_sum = 0.0
    for i, row in enumerate(rows_in):
        frame = load_frame(base / row["file"], frame_index=i)
        roi = synth_roi(row["cx"], row["cy"], row["iris_r"], frame,
                        cfg.jitter_seed, row["file"])
        try:
            iris = detect_iris(frame, roi, cfg.r_min, cfg.r_max, cfg.stride)
        except NoValidCandidate:
            center_hist[99] = center_hist.get(99, 0) + 1
            continue
        ce = max(abs(iris.ex - row["cx"]), abs(iris.ey - row["cy"]))
        re = abs(iris.er - row["iris_r"])
        center_hist[ce] = center_hist.get(ce, 0) + 1
        radius_hist[re] = radius_hist.get(re, 0) + 1
        try:
            pupil = detect_pupil(frame, iris, cfg.neighborhood)
        except (NoPupilContrast, OutOfBounds):
            continue
        pe = abs(pupil.pr - row["pupil_r"])
        pupil_exact += pe == 0
        pupil_within_1 += pe <= 1
        areas = ev.circle_overlap(
            ev.Circle(row["cx"], row["cy"], row["pupil_r"]),
            ev.Circle(pupil.px, pupil.py, pupil.pr),
            frame.width, frame.height)
        p, r, f1 = ev.pupil_prf(*areas)
        prf_sums[0] += p
        prf_sums[1] += r
        prf_sums[2] += f1
        prf_count += 1
        diam_sum += ev.diameter_accuracy(2 * pupil.pr, 2 * row["pupil_r"])

    within = lambda hist, t: sum(v for k, v in hist.items() if k <= t) / n
    rows = [("samples", n, None),
            ("iris_center_within_1", within(center_hist, 1), None),
            ("iris_radius_within_1", within(radius_hist, 1), None),
            ("pupil_exact", pupil_exact / n, None),
            ("pupil_within_1", pupil_within_1 / n, None)]
    if prf_count:
        rows += [("pupil_P", prf_sums[0] / prf_count,
                  ev.REFERENCE_PUPIL_PRF["P"]),
                 ("pupil_R", prf_sums[1] / prf_count,
                  ev.REFERENCE_PUPIL_PRF["R"]),
                 ("pupil_F1", prf_sums[2] / prf_count,
                  ev.REFERENCE_PUPIL_PRF["F1"]),
                 ("diameter_accuracy", diam_sum / prf_count, 0.85)]
    for err in sorted(center_hist):
        rows.append((f"center_err_{err}", center_hist[err], None))
    for err in sorted(radius_hist):
        rows.append((f"radius_err_{err}", radius_hist[err], None))
    return rows


def eval_pupil_csv(dataset: Path, cfg: RunConfig) -> list[tuple]:
    ann_path = dataset / "annotations.csv"
    table = ev.load_annotation_csv(ann_path)

    prf_sums = [0.0, 0.0, 0.0]
    diam_sum = 0.0
    n_eyes = 0
    agreement_sums = [0.0, 0.0, 0.0]
    agreement_n = 0
    for sample_id in sorted(table):
        circles = table[sample_id]
        image = None
        for suffix in IMAGE_SUFFIXES:
            candidate = dataset / f"{sample_id}{suffix}"
            if candidate.exists():
                image = candidate
                break
        if image is None:
            print(f"warning: no image for {sample_id}, skipped",
                  file=sys.stderr)
            continue
        frame = load_frame(image)
        iris_by_side: dict[str, list[ev.Circle]] = {"left": [], "right": []}
        pupil_by_side: dict[str, list[ev.Circle]] = {"left": [], "right": []}
        for entry in circles:
            target = iris_by_side if entry.kind == "iris" else pupil_by_side
            target[entry.side].append(entry.circle)
        if not iris_by_side["left"] or not iris_by_side["right"]:
            print(f"warning: {sample_id} lacks iris annotations, skipped",
                  file=sys.stderr)
            continue
        mean_center = lambda cs: (sum(c.cx for c in cs) / len(cs),
                                  sum(c.cy for c in cs) / len(cs))
        lx, ly = mean_center(iris_by_side["left"])
        rx, ry = mean_center(iris_by_side["right"])
        ann = ev.EyeAnnotation(lx=lx, ly=ly, rx=rx, ry=ry)
        left, right = ev.roi_provider(ann, frame.width, frame.height,
                                      mode=cfg.roi_mode, pad=cfg.roi_pad,
                                      jitter_seed=cfg.jitter_seed,
                                      sample_id=sample_id)
        for side, roi in (("left", left), ("right", right)):
            annotated = pupil_by_side[side]
            if not annotated:
                continue
            if len(annotated) >= 2:
                pair_mean, consensus = ev.inter_annotator(
                    annotated, frame.width, frame.height)
                for i in range(3):
                    agreement_sums[i] += pair_mean[i]
                agreement_n += 1
            else:
                consensus = annotated[0]
            try:
                iris = detect_iris(frame, roi, cfg.r_min, cfg.r_max,
                                   cfg.stride)
                pupil = detect_pupil(frame, iris, cfg.neighborhood)
            except (NoValidCandidate, NoPupilContrast, OutOfBounds):
                continue
            areas = ev.circle_overlap(
                consensus, ev.Circle(pupil.px, pupil.py, pupil.pr),
                frame.width, frame.height)
            p, r, f1 = ev.pupil_prf(*areas)
            prf_sums[0] += p
            prf_sums[1] += r
            prf_sums[2] += f1
            diam_sum += ev.diameter_accuracy(2 * pupil.pr, 2 * consensus.r)
            n_eyes += 1

    if n_eyes == 0:
        raise EmptyDataset(f"{dataset}: no evaluable pupil annotations")
    rows = [("eyes", n_eyes, None),
            ("pupil_P", prf_sums[0] / n_eyes, ev.REFERENCE_PUPIL_PRF["P"]),
            ("pupil_R", prf_sums[1] / n_eyes, ev.REFERENCE_PUPIL_PRF["R"]),
            ("pupil_F1", prf_sums[2] / n_eyes, ev.REFERENCE_PUPIL_PRF["F1"]),
            ("diameter_accuracy", diam_sum / n_eyes, 0.85)]
    if agreement_n:
        rows += [("inter_annotator_P", agreement_sums[0] / agreement_n,
                  ev.REFERENCE_INTER_ANNOTATOR["P"]),
                 ("inter_annotator_R", agreement_sums[1] / agreement_n,
                  ev.REFERENCE_INTER_ANNOTATOR["R"]),
                 ("inter_annotator_F1", agreement_sums[2] / agreement_n,
                  ev.REFERENCE_INTER_ANNOTATOR["F1"])]
    return rows


def cmd_eval(args, cfg: RunConfig) -> int:
    dataset = Path(args.dataset)
    if args.kind == "bioid":
        rows = eval_bioid(dataset, cfg)
    elif args.kind == "synth-manifest":
        rows = eval_synth_manifest(dataset, cfg)
    else:
        rows = eval_pupil_csv(dataset, cfg)
    _print_report(rows, cfg.fmt)
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    manifest = sy.write_dataset(args.out_dir, args.count, args.preset,
                                args.seed, chroma=not args.gray)
    print(manifest)
    return 0


def cmd_maskdump(args, cfg: RunConfig) -> int:
    print(render_mask_text(build_mask(args.radius)))
    return 0


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PupilkitError(f"{path}: bad config line {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_KEYS = {
    "r_min": int, "r_max": int, "stride": int, "neighborhood": int,
    "window": int, "roi_mode": str, "roi_pad": int, "jitter_seed": int,
    "frame_stride": int, "workers": int, "format": str, "tolerances": str,
}


def _parse_tolerances(text: str) -> tuple:
    try:
        values = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise PupilkitError(f"bad tolerance list {text!r}") from exc
    if not values:
        raise PupilkitError(f"bad tolerance list {text!r}")
    return values


def build_config(args) -> RunConfig:
    file_values = _read_config_file(args.config) if args.config else {}
    merged = {}
    for key, cast in _CONFIG_KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_values:
            merged[key] = cast(file_values[key])
    tolerances = merged.pop("tolerances", None)
    fmt = merged.pop("format", None)
    cfg = RunConfig(**merged)
    if fmt is not None:
        cfg.fmt = fmt
    if tolerances is not None:
        cfg.tolerances = (_parse_tolerances(tolerances)
                          if isinstance(tolerances, str) else tolerances)
    return cfg


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--r-min", dest="r_min", type=int)
    parser.add_argument("--r-max", dest="r_max", type=int)
    parser.add_argument("--stride", type=int, help="candidate center stride")
    parser.add_argument("--neighborhood", type=int,
                        help="pupil search half-width around the iris center")
    parser.add_argument("--roi-mode", dest="roi_mode",
                        choices=["centered", "jittered", "file"])
    parser.add_argument("--roi-pad", dest="roi_pad", type=int)
    parser.add_argument("--roi-file", dest="roi_file",
                        help="sidecar CSV for --roi-mode file")
    parser.add_argument("--jitter-seed", dest="jitter_seed", type=int)
    parser.add_argument("--frame-stride", dest="frame_stride", type=int)
    parser.add_argument("--window", type=int, help="frames per report window")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--format", dest="format", choices=["csv", "jsonl"])
    parser.add_argument("--tolerances",
                        help="comma-separated tolerance list for eval")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pupilkit",
        description="Iris and pupil detection and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="per-frame detection records")
    p.add_argument("input", help="image file or directory of frames")
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("stream",
                       help="windowed best-frame reports from stdin paths")
    _add_common(p)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("eval", help="dataset metrics report")
    p.add_argument("dataset", help="dataset directory or manifest")
    p.add_argument("--kind", required=True,
                   choices=["bioid", "pupil-csv", "synth-manifest"])
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic eye dataset")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--preset", choices=["clean", "noisy"], default="noisy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gray", action="store_true",
                   help="neutral chroma (grayscale pngs)")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("maskdump", help="render a mask grid as text")
    p.add_argument("radius", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_maskdump)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except BrokenPipeError:
        return 0
    except PupilkitError as exc:
        print(f"error data {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - single-line internal error
        print(f"error internal {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
