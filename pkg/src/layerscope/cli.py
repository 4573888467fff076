"""Command-line surface: `layerscope <subcommand>`.

Every subcommand writes its artifacts into --out and finishes by
writing a manifest listing each artifact with its hash, so identical
invocations can be compared byte-for-byte. Exit codes: 0 success,
2 validation problem, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acoustics import (
    F0_PRESETS,
    measure_durations,
    normalized_time_sample,
    read_tier,
    track_f0,
    track_formants,
    track_intensity,
)
from .analysis import (
    build_profiles,
    linear_regression,
    pearson,
    rank_latents,
    spectral_cluster,
)
from .exceptions import LayerscopeError, ValidationError, WeightFormatError
from .generator import forward, sample_latent
from .io.lgw import load_weights
from .io.manifest import build_manifest, utc_now, write_manifest
from .io.plotio import PlotSeries, emit_plot, read_columns_csv, write_columns_csv
from .io.wavio import read_wav, write_wav
from .parallel import ordered_map, thread_limit
from .probe import LayerProbe, layer_nyquist, probe_to_waveform, probes_from_trace
from .rng import Rng, derive_seed
from .sweep import SweepSpec, SweepTarget, run_sweep


def _parse_overrides(pairs) -> dict[int, float]:
    overrides = {}
    for pair in pairs or []:
        for piece in pair.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise ValidationError(f"override {piece!r} must look like z11=-15")
            key, _, value = piece.partition("=")
            key = key.strip().lstrip("z")
            try:
                index = int(key)
                overrides[index] = float(value)
            except ValueError:
                raise ValidationError(f"cannot parse override {piece!r}")
    return overrides


def _parse_code(text):
    if text is None:
        return None
    try:
        return np.array([float(v) for v in text.split(",")], dtype=np.float64)
    except ValueError:
        raise ValidationError(f"cannot parse code {text!r} (expected e.g. 0,1)")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(args, command: str, params: dict, out: Path, artifacts, started: str,
            seed=None, weights=None) -> int:
    manifest = build_manifest(
        command=command, parameters=params, out_dir=out,
        artifact_paths=[Path(a) for a in artifacts], seed=seed,
        weights_path=weights, started=started, finished=utc_now(),
    )
    write_manifest(manifest, out)
    return 0


def _column(table: dict, name: str, path) -> np.ndarray:
    if name not in table:
        raise ValidationError(f"{path}: no column named {name!r} (has {list(table)})")
    col = table[name]
    if col.dtype == object:
        raise ValidationError(f"{path}: column {name!r} is not numeric")
    return col


def _cmd_generate(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    bundle = load_weights(args.weights)
    spec = bundle.spec
    overrides = _parse_overrides(args.override)
    code = _parse_code(args.code)

    def one(i: int):
        rng = Rng(derive_seed(args.seed, i))
        latent = sample_latent(rng, spec, overrides=overrides, code=code)
        return latent, forward(bundle, latent).waveform

    results = ordered_map(one, range(args.count), threads=thread_limit())
    artifacts = []
    rows = []
    for i, (latent, waveform) in enumerate(results):
        wav_path = out / f"output_{i:03d}.wav"
        write_wav(waveform, wav_path, encoding=args.encoding)
        artifacts.append(wav_path)
        rows.append(latent.full())
    header = ["output"] + [f"c{j}" for j in range(spec.code_dim)] + \
             [f"z{j}" for j in range(spec.latent_dim)]
    matrix = np.array(rows)
    columns = [np.arange(len(rows))] + [matrix[:, j] for j in range(matrix.shape[1])]
    latents_path = out / "latents.csv"
    write_columns_csv(latents_path, header, columns)
    artifacts.append(latents_path)
    params = {"count": args.count, "override": args.override or [],
              "code": args.code, "encoding": args.encoding}
    return _finish(args, "generate", params, out, artifacts, started,
                   seed=args.seed, weights=args.weights)


def _write_probe_files(out: Path, trace, spec, encoding: str):
    probes = probes_from_trace(trace)
    artifacts = []
    for probe in probes:
        n = probe.series.shape[0]
        csv_path = out / f"probe_conv{probe.layer_index}.csv"
        write_columns_csv(
            csv_path, ["layer", "t", "value"],
            [np.full(n, probe.layer_index, dtype=np.int64), np.arange(n), probe.series],
        )
        artifacts.append(csv_path)
        wav_path = out / f"probe_conv{probe.layer_index}.wav"
        write_wav(probe_to_waveform(probe), wav_path, encoding=encoding)
        artifacts.append(wav_path)
    meta_path = out / "probe_meta.csv"
    write_columns_csv(
        meta_path,
        ["layer", "samples", "nyquist_hz", "scale_hint"],
        [
            np.array([p.layer_index for p in probes], dtype=np.int64),
            np.array([p.series.shape[0] for p in probes], dtype=np.int64),
            np.array([layer_nyquist(spec, p.layer_index) for p in probes]),
            np.array([p.scale_hint for p in probes]),
        ],
    )
    artifacts.append(meta_path)
    return artifacts


def _cmd_probe(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    bundle = load_weights(args.weights)
    overrides = _parse_overrides(args.override)
    code = _parse_code(args.code)
    rng = Rng(derive_seed(args.seed, 0))
    latent = sample_latent(rng, bundle.spec, overrides=overrides, code=code)
    trace = forward(bundle, latent)
    artifacts = [out / "output.wav"]
    write_wav(trace.waveform, artifacts[0], encoding=args.encoding)
    artifacts += _write_probe_files(out, trace, bundle.spec, args.encoding)
    params = {"override": args.override or [], "code": args.code,
              "encoding": args.encoding}
    return _finish(args, "probe", params, out, artifacts, started,
                   seed=args.seed, weights=args.weights)


def _cmd_sweep(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    bundle = load_weights(args.weights)
    spec = bundle.spec
    overrides = _parse_overrides(args.override)
    code = _parse_code(args.code)
    rng = Rng(derive_seed(args.seed, 0))
    base = sample_latent(rng, spec, overrides=overrides, code=code)
    target = SweepTarget.parse(args.target)
    sweep_spec = SweepSpec(target=target, start=args.start, end=args.end,
                           step=args.step, base_latent=base)
    result = run_sweep(sweep_spec, bundle)

    artifacts = []
    for k, step in enumerate(result.steps):
        step_dir = out / f"step_{k:03d}"
        step_dir.mkdir(parents=True, exist_ok=True)
        wav_path = step_dir / "output.wav"
        write_wav(step.waveform, wav_path, encoding=args.encoding)
        artifacts.append(wav_path)
        for probe in step.probes:
            n = probe.series.shape[0]
            csv_path = step_dir / f"probe_conv{probe.layer_index}.csv"
            write_columns_csv(
                csv_path, ["layer", "t", "value"],
                [np.full(n, probe.layer_index, dtype=np.int64), np.arange(n), probe.series],
            )
            artifacts.append(csv_path)
    sweep_json = out / "sweep.json"
    payload = {
        "target": target.label,
        "start": args.start,
        "end": args.end,
        "step": args.step,
        "values": [float(v) for v in result.values],
        "base_z": [float(v) for v in base.z],
        "base_code": None if base.code is None else [float(v) for v in base.code],
    }
    sweep_json.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    artifacts.append(sweep_json)
    params = {"target": args.target, "from": args.start, "to": args.end,
              "step": args.step, "override": args.override or [],
              "code": args.code, "encoding": args.encoding}
    return _finish(args, "sweep", params, out, artifacts, started,
                   seed=args.seed, weights=args.weights)


def _cmd_acoustics(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    measure = args.measure
    artifacts = []
    params = {"measure": measure}
    if measure == "duration":
        tier_a = read_tier(args.tier_a, max_time=args.max_time)
        tier_b = read_tier(args.tier_b, max_time=args.max_time)
        pairs = measure_durations(tier_a, tier_b, args.label)
        path = out / "durations.csv"
        write_columns_csv(path, ["duration_a", "duration_b"],
                          [pairs[:, 0], pairs[:, 1]])
        artifacts.append(path)
        params.update({"tier_a": str(args.tier_a), "tier_b": str(args.tier_b),
                       "label": args.label})
        return _finish(args, "acoustics", params, out, artifacts, started)

    wav = read_wav(args.infile)
    params["in"] = str(args.infile)
    if measure == "f0":
        floor, ceiling = args.floor, args.ceiling
        if args.preset:
            floor, ceiling = F0_PRESETS[args.preset]
        track = track_f0(wav.samples, wav.rate, floor=floor, ceiling=ceiling)
        path = out / "f0.csv"
        write_columns_csv(path, ["time", "value"], [track.times, track.f0])
        artifacts.append(path)
        params.update({"floor": floor, "ceiling": ceiling})
    elif measure == "intensity":
        track = track_intensity(wav.samples, wav.rate, min_pitch=args.min_pitch)
        path = out / "intensity.csv"
        write_columns_csv(path, ["time", "value"], [track.times, track.db])
        artifacts.append(path)
        params.update({"min_pitch": args.min_pitch})
    elif measure == "formants":
        track = track_formants(wav.samples, wav.rate, max_formant=args.max_formant,
                               lpc_order=args.order)
        path = out / "formants.csv"
        write_columns_csv(path, ["time", "f1", "f2", "b1", "b2"],
                          [track.times, track.f1, track.f2, track.b1, track.b2])
        artifacts.append(path)
        params.update({"max_formant": args.max_formant, "order": args.order,
                       "skipped_frames": track.n_skipped})
    else:
        raise ValidationError(f"unknown measurement {measure!r}")
    return _finish(args, "acoustics", params, out, artifacts, started)


def _cmd_correlate(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    x = _column(read_columns_csv(args.x), args.x_column, args.x)
    y = _column(read_columns_csv(args.y), args.y_column, args.y)
    if x.shape[0] != y.shape[0]:
        raise ValidationError(
            f"column lengths differ: {x.shape[0]} vs {y.shape[0]}"
        )
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    result = {"n": int(x.shape[0]), "r": pearson(x, y)}
    if args.regress:
        reg = linear_regression(x, y)
        result.update({
            "slope": reg.slope, "intercept": reg.intercept,
            "t_stat": reg.t_stat, "p_value": reg.p_value, "adj_r2": reg.adj_r2,
        })
    path = out / "correlation.json"
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    print(f"r = {result['r']:.6f} (n = {result['n']})")
    params = {"x": str(args.x), "y": str(args.y), "x_column": args.x_column,
              "y_column": args.y_column, "regress": bool(args.regress)}
    return _finish(args, "correlate", params, out, [path], started)


def _cmd_rank_latents(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    table = read_columns_csv(args.latents)
    feature_names = [n for n in table if n not in ("output", "presence")
                     and table[n].dtype != object]
    if not feature_names:
        raise ValidationError(f"{args.latents}: no numeric feature columns")
    X = np.column_stack([table[n] for n in feature_names])
    presence_table = read_columns_csv(args.presence)
    if "presence" in presence_table:
        y = presence_table["presence"]
    else:
        first = next(iter(presence_table))
        y = _column(presence_table, first, args.presence)
    result = rank_latents(X, y, ridge=args.ridge)
    path = out / "ranking.csv"
    write_columns_csv(
        path,
        ["rank", "index", "feature", "coefficient", "score"],
        [
            np.arange(len(result.entries)),
            np.array([e.index for e in result.entries], dtype=np.int64),
            np.array([feature_names[e.index] for e in result.entries], dtype=object),
            np.array([e.coefficient for e in result.entries]),
            np.array([e.score for e in result.entries]),
        ],
    )
    meta = out / "ranking.json"
    meta.write_text(json.dumps({
        "method": result.method, "converged": result.converged,
        "n_iter": result.n_iter,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    top = result.entries[0]
    print(f"top latent: {feature_names[top.index]} (|coef| = {top.score:.6f}, "
          f"method = {result.method})")
    params = {"latents": str(args.latents), "presence": str(args.presence),
              "ridge": args.ridge}
    return _finish(args, "rank-latents", params, out, [path, meta], started)


def _cmd_profiles(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    bundle = load_weights(args.weights)
    conditions = [_parse_overrides([c]) for c in (args.condition or [None])]
    if args.condition is None:
        conditions = [{}]
    code = _parse_code(args.code)
    profiles = build_profiles(bundle, conditions, args.n, args.layer,
                              seed=args.seed, code=code)
    artifacts = []
    meta = []
    for idx, profile in enumerate(profiles):
        path = out / f"profile_{idx:02d}.csv"
        n_maps, samples = profile.maps.shape
        header = ["map_index"] + [f"t{j}" for j in range(samples)]
        columns = [np.arange(n_maps, dtype=np.int64)] + \
                  [profile.maps[:, j] for j in range(samples)]
        write_columns_csv(path, header, columns)
        artifacts.append(path)
        meta.append({"file": path.name, "condition": profile.condition,
                     "layer_index": profile.layer_index,
                     "n_outputs_averaged": profile.n_outputs_averaged})
    meta_path = out / "profiles.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    artifacts.append(meta_path)
    params = {"layer": args.layer, "n": args.n,
              "condition": args.condition or [], "code": args.code}
    return _finish(args, "profiles", params, out, artifacts, started,
                   seed=args.seed, weights=args.weights)


def _cmd_cluster(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    table = read_columns_csv(args.profiles)
    sample_names = [n for n in table if n != "map_index" and table[n].dtype != object]
    if not sample_names or "map_index" not in table:
        raise ValidationError(f"{args.profiles}: expected map_index plus sample columns")
    matrix = np.column_stack([table[n] for n in sample_names])
    result = spectral_cluster(matrix, gamma=args.gamma, k=args.k, seed=args.seed)
    path = out / "clusters.csv"
    write_columns_csv(path, ["map_index", "cluster"],
                      [table["map_index"].astype(np.int64), result.assignments])
    sizes = np.bincount(result.assignments, minlength=args.k)
    print("cluster sizes: " + ", ".join(str(int(s)) for s in sizes))
    params = {"profiles": str(args.profiles), "gamma": args.gamma, "k": args.k}
    return _finish(args, "cluster", params, out, [path], started, seed=args.seed)


def _cmd_export_wav(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    table = read_columns_csv(args.series)
    values = _column(table, args.column, args.series)
    probe = LayerProbe(layer_index=0, series=values)
    waveform = probe_to_waveform(probe)
    path = out / args.name
    write_wav(waveform, path, encoding=args.encoding)
    params = {"series": str(args.series), "column": args.column, "name": args.name,
              "encoding": args.encoding}
    return _finish(args, "export-wav", params, out, [path], started)


def _cmd_plot(args) -> int:
    started = utc_now()
    out = _out_dir(args)
    labels = args.label or []
    scales = args.scale or []
    if labels and len(labels) != len(args.series):
        raise ValidationError("--label count must match --series count")
    if scales and len(scales) != len(args.series):
        raise ValidationError("--scale count must match --series count")
    series = []
    for i, path in enumerate(args.series):
        table = read_columns_csv(path)
        values = _column(table, args.column, path)
        values = values[np.isfinite(values)]
        if values.shape[0] == 0:
            raise ValidationError(f"{path}: no finite values in column {args.column!r}")
        label = labels[i] if labels else Path(path).stem
        scale = float(scales[i]) if scales else 1.0
        series.append(PlotSeries(label=label, values=values, scale=scale))
    csv_path, svg_path = emit_plot(series, out / args.name)
    params = {"series": [str(s) for s in args.series], "column": args.column,
              "label": labels, "scale": [float(s) for s in scales], "name": args.name}
    return _finish(args, "plot", params, out, [csv_path, svg_path], started)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layerscope",
        description="Listen to and measure the intermediate layers of a waveform generator.",
    )
    parser.add_argument("--version", action="version", version=f"layerscope {__version__}")
    sub = parser.add_subparsers(dest="command")

    def common(p, weights=False, seed=False):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", default=None, help="JSON file with default flag values")
        if weights:
            p.add_argument("--weights", required=True, help=".lgw weight file")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="64-bit root seed")

    p = sub.add_parser("generate", help="generate outputs from random latents")
    common(p, weights=True, seed=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--override", action="append", help="pin a z entry, e.g. z11=-15")
    p.add_argument("--code", default=None, help="code entries, e.g. 0,1")
    p.add_argument("--encoding", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("probe", help="trace one output and export layer probes")
    common(p, weights=True, seed=True)
    p.add_argument("--override", action="append")
    p.add_argument("--code", default=None)
    p.add_argument("--encoding", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("sweep", help="sweep one latent entry through marginal values")
    common(p, weights=True, seed=True)
    p.add_argument("--target", required=True, help="z11 or c0 style label")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="end", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--override", action="append")
    p.add_argument("--code", default=None)
    p.add_argument("--encoding", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("acoustics", help="measure audio files")
    meas = p.add_subparsers(dest="measure", required=True)

    pf = meas.add_parser("f0", help="pitch track")
    common(pf)
    pf.add_argument("--in", dest="infile", required=True)
    pf.add_argument("--floor", type=float, default=60.0)
    pf.add_argument("--ceiling", type=float, default=300.0)
    pf.add_argument("--preset", choices=sorted(F0_PRESETS), default=None)
    pf.set_defaults(func=_cmd_acoustics)

    pi = meas.add_parser("intensity", help="intensity track")
    common(pi)
    pi.add_argument("--in", dest="infile", required=True)
    pi.add_argument("--min-pitch", type=float, default=100.0)
    pi.set_defaults(func=_cmd_acoustics)

    pm = meas.add_parser("formants", help="F1/F2 track")
    common(pm)
    pm.add_argument("--in", dest="infile", required=True)
    pm.add_argument("--max-formant", type=float, default=5000.0)
    pm.add_argument("--order", type=int, default=10)
    pm.set_defaults(func=_cmd_acoustics)

    pd = meas.add_parser("duration", help="paired interval durations")
    common(pd)
    pd.add_argument("--tier-a", required=True)
    pd.add_argument("--tier-b", required=True)
    pd.add_argument("--label", required=True)
    pd.add_argument("--max-time", type=float, default=1.024)
    pd.set_defaults(func=_cmd_acoustics)

    p = sub.add_parser("correlate", help="Pearson r between two CSV columns")
    common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--x-column", default="value")
    p.add_argument("--y-column", default="value")
    p.add_argument("--regress", action="store_true",
                   help="also fit OLS with slope t-test")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("rank-latents", help="rank latent entries against a binary label")
    common(p)
    p.add_argument("--latents", required=True, help="CSV of latent rows")
    p.add_argument("--presence", required=True, help="CSV with binary presence column")
    p.add_argument("--ridge", type=float, default=1e-3)
    p.set_defaults(func=_cmd_rank_latents)

    p = sub.add_parser("profiles", help="average per-map activation profiles")
    common(p, weights=True, seed=True)
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="outputs per condition")
    p.add_argument("--condition", action="append",
                   help="override set per condition, e.g. z11=-15")
    p.add_argument("--code", default=None)
    p.set_defaults(func=_cmd_profiles)

    p = sub.add_parser("cluster", help="spectral-cluster a profile matrix")
    common(p, seed=True)
    p.add_argument("--profiles", required=True, help="profile CSV (map_index + samples)")
    p.add_argument("--gamma", type=float, default=1e-10)
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("export-wav", help="turn a probe CSV into audible WAV")
    common(p)
    p.add_argument("--series", required=True)
    p.add_argument("--column", default="value")
    p.add_argument("--name", default="probe.wav")
    p.add_argument("--encoding", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_export_wav)

    p = sub.add_parser("plot", help="overlay series as CSV + SVG")
    common(p)
    p.add_argument("--series", action="append", required=True)
    p.add_argument("--column", default="value")
    p.add_argument("--label", action="append")
    p.add_argument("--scale", action="append", type=float)
    p.add_argument("--name", default="figure")
    p.set_defaults(func=_cmd_plot)

    return parser


def _apply_config(args, argv) -> None:
    if getattr(args, "config", None) is None:
        return
    path = Path(args.config)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValidationError(f"config {path} must hold a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        flag = "--" + key
        given = any(a == flag or a.startswith(flag + "=") for a in argv)
        if not given and hasattr(args, dest):
            setattr(args, dest, value)


def cli_main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        _apply_config(args, argv)
        return args.func(args)
    except (ValidationError, WeightFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LayerscopeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # keep the contract: anything unexpected is exit 1
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
