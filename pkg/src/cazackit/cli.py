"""Command-line surface: generation, analysis, ambiguity surfaces, campaigns.

Every run resolves its options from an optional ``key = value`` config file
(one section per command) plus flags, with flags taking precedence, and emits
a JSON manifest echoing the fully-resolved configuration.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__, corr, extend, numtheory, seqgen, sim

DEFAULT_SEED = 20260101


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _parse_grid(text: str) -> tuple[float, ...]:
    lo, hi, step = _parse_floats(text)
    n = int(round((hi - lo) / step))
    return tuple(lo + k * step for k in range(n + 1))


def _parse_split(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace("-", ",").split(",") if v.strip())


def _threads() -> int:
    raw = os.environ.get("CAZACKIT_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"CAZACKIT_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ValueError("CAZACKIT_THREADS must be >= 0 (0 = auto)")
    return value


def _load_config(path: str | None, command: str) -> dict[str, str]:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ValueError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read(path)
    if not cp.has_section(command):
        return {}
    return dict(cp.items(command))


def _resolve(args: argparse.Namespace, file_vals: dict[str, str],
             defaults: dict) -> dict:
    """Merge precedence: flags > config file > defaults."""
    out = dict(defaults)
    out.update(file_vals)
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        out[key] = val
    return out


def _write_manifest(out_prefix: str, command: str, resolved: dict) -> None:
    manifest = {"tool": "cazackit", "version": __version__, "command": command,
                "threads": _threads(),
                "config": {k: v for k, v in sorted(resolved.items())}}
    with open(out_prefix + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")


def _build_set(family: str, extension: str, split: tuple[int, ...], n: int,
               kind: str, count: int | None) -> seqgen.SequenceSet:
    if extension == "repetition":
        q = split[0]
        return extend.repetition_set(q, n, count or q, family=family)
    gsplit = numtheory.GoldbachSplit(split, n)
    plan_kind = {"cyclic": "CyclicShift", "root": "RootIndex"}[kind]
    plan = extend.ExtensionPlan(
        n, gsplit, plan_kind,
        count or (max(split) if plan_kind == "CyclicShift"
                  else max(p - 1 for p in split)))
    bases = extend.default_bases(gsplit, family)
    builder = extend.extend_even if len(split) == 2 else extend.extend_odd
    return builder(plan, bases)


_FAMILY = {"bjorck": "Bjorck", "zc": "ZC"}


def cmd_gen(cfg: dict) -> int:
    family = _FAMILY[str(cfg["family"]).lower()]
    out = cfg["out"]
    if cfg.get("extend", "none") in (None, "none", ""):
        q = int(cfg["q"])
        if family == "ZC":
            seq = seqgen.zc(int(cfg.get("root", 1)), q)
        else:
            seq = seqgen.bjorck(q)
        seqgen.write_sequence_csv(seq, out + ".csv")
    else:
        n = int(cfg["n"])
        if "split" in cfg and cfg["split"]:
            split = _parse_split(str(cfg["split"]))
        else:
            policy = numtheory.SplitPolicy[str(cfg.get("policy", "maxq1")).upper()
                                           .replace("MAXQ1", "MAX_Q1")]
            fn = numtheory.goldbach_even if n % 2 == 0 else numtheory.goldbach_odd
            split = fn(n, policy).parts
        count = int(cfg["count"]) if cfg.get("count") else None
        sset = _build_set(family, str(cfg["extend"]), split, n,
                          str(cfg.get("kind", "cyclic")), count)
        extend.write_set_csv(sset, out + ".csv", out + ".meta.json")
    _write_manifest(out, "gen", cfg)
    return 0


def cmd_analyze(cfg: dict) -> int:
    sset = extend.read_set_csv(cfg["input"])
    what = str(cfg.get("what", "inner"))
    out = cfg["out"]
    cols = [c.samples for c in sset.columns]
    if what == "inner":
        m = np.stack(cols, axis=1)
        gram = np.abs(m.conj().T @ m)
        with open(out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "abs_inner"])
            for i in range(gram.shape[0]):
                for j in range(gram.shape[1]):
                    w.writerow([i, j, seqgen.FLOAT_FMT % gram[i, j]])
    elif what == "profiles":
        i, j = (int(v) for v in str(cfg.get("pair", "0,1")).split(","))
        corr.write_profile_csv(corr.periodic_xcorr(cols[i], cols[j]),
                               out + ".periodic.csv")
        corr.write_profile_csv(corr.aperiodic_xcorr(cols[i], cols[j]),
                               out + ".aperiodic.csv")
    elif what == "rms":
        split = tuple(sset.meta.get("split", ())) or \
            _parse_split(str(cfg.get("split", "")))
        if len(split) < 2:
            raise ValueError("rms analysis needs a two-part goldbach split "
                             "(pass split=q1,q2 when reading a bare CSV)")
        n = len(cols[0])
        q1, q2 = split[0], split[1]
        rows = []
        for case, pick in (
                (corr.RmsCase.PERIODIC_CASE1, corr.periodic_xcorr),
                (corr.RmsCase.APERIODIC_CASE1, corr.aperiodic_xcorr)):
            measured = []
            for i in range(len(cols)):
                for j in range(len(cols)):
                    # auto short assignment: pi(c) = c mod q2
                    if i != j and i % q2 != j % q2:
                        measured.append(pick(cols[i], cols[j]).rms)
            pred = corr.predict_rms(case, n, q1, q2).value
            meas = float(np.mean(measured))
            rows.append((case.name, pred, meas, abs(meas - pred) / pred))
        with open(out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "predicted", "measured", "rel_err"])
            for name, pred, meas, rel in rows:
                w.writerow([name, seqgen.FLOAT_FMT % pred,
                            seqgen.FLOAT_FMT % meas, seqgen.FLOAT_FMT % rel])
    else:
        raise ValueError(f"unknown analysis {what!r}")
    _write_manifest(out, "analyze", cfg)
    return 0


def cmd_ambiguity(cfg: dict) -> int:
    family = _FAMILY[str(cfg.get("family", "bjorck")).lower()]
    n = int(cfg.get("n", 120))
    split = _parse_split(str(cfg.get("split", "113,7")))
    scs = float(cfg.get("scs", 15e3))
    nfft = int(cfg.get("nfft", 128))
    fs = nfft * scs
    grid = _parse_grid(str(cfg.get("grid", "-45e3,45e3,1e3")))
    if not grid:
        raise ValueError("empty hypothesis grid")
    sset = _build_set(family, "goldbach", split, n, "cyclic", max(split))
    rx_shift = int(cfg.get("rx_shift", 0))
    ref_shift = int(cfg.get("ref_shift", 0))
    doppler = float(cfg.get("rx_doppler", 0.0))
    k = np.arange(nfft)
    rx = sim.time_reference(sset.columns[rx_shift], nfft) \
        * np.exp(2j * np.pi * doppler * k / fs)
    ref = sim.time_reference(sset.columns[ref_shift], nfft)
    coarse = cfg.get("coarse")
    if coarse not in (None, ""):
        rx = rx * np.exp(-2j * np.pi * float(coarse) * k / fs)
        if str(cfg.get("narrow", "false")).lower() in ("1", "true", "yes"):
            step = grid[1] - grid[0] if len(grid) > 1 else 500.0
            grid = _parse_grid(f"{-scs / 2},{scs / 2},{step}")
    surface = corr.ambiguity(ref, rx, np.asarray(grid), fs)
    out = cfg["out"]
    corr.write_surface_csv(surface, out + ".csv")
    _write_manifest(out, "ambiguity", cfg)
    print(f"peak delay={surface.peak_delay} freq={surface.peak_freq_hz:g} Hz "
          f"magnitude={surface.peak_magnitude:.6f}")
    return 0


_SCENARIOS = {
    "tn": dict(hyp="-2e3,2e3,500", doppler="-1e3,1e3", interferers=0,
               sinr="-14,-11,-8,-5,0,5", delay_window=16, search_window=17,
               curves="bjorck,goldbach,113-7;zc,goldbach,113-7",
               fractional_delay="false"),
    "ntn": dict(hyp="-45e3,45e3,500", doppler="-40e3,40e3", interferers=0,
                sinr="-14,-11,-8,-5,0,5", delay_window=16, search_window=17,
                curves="bjorck,goldbach,113-7;zc,goldbach,113-7",
                fractional_delay="false"),
    "interference": dict(hyp="-2e3,2e3,500", doppler="-1e3,1e3", interferers=13,
                         sinr="-25,-20,-15,-10,-5,0", delay_window=3,
                         search_window=4, overlap="zero",
                         curves=("bjorck,goldbach,101-19;bjorck,goldbach,113-7;"
                                 "bjorck,repetition,113"),
                         fractional_delay="true"),
}


def cmd_simulate(cfg: dict) -> int:
    preset = _SCENARIOS.get(str(cfg.get("scenario", "tn")))
    if preset is None:
        raise ValueError(f"unknown scenario {cfg.get('scenario')!r}")
    merged = dict(preset)
    merged.update({k: v for k, v in cfg.items() if v is not None})
    scs = float(merged.get("scs", 15e3))
    nfft = int(merged.get("nfft", 128))
    out = merged["out"]
    rows = []
    for curve in str(merged["curves"]).split(";"):
        family_key, extension, split_txt = (v.strip() for v in curve.split(","))
        family = _FAMILY[family_key.lower()]
        split = _parse_split(split_txt)
        n = int(merged.get("n", 120))
        sset = _build_set(family, extension, split, n, "cyclic", None)
        name = f"{merged.get('scenario')}_{family_key}_{extension}_" + \
            "-".join(str(p) for p in split)
        scenario = sim.SimScenario(
            name=name, candidates=sset, scs_hz=scs, sample_rate_hz=nfft * scs,
            carrier_hz=float(merged.get("carrier", 2e9)),
            doppler_range_hz=tuple(_parse_floats(str(merged["doppler"]))),
            hypotheses_hz=_parse_grid(str(merged["hyp"])),
            sinr_db=_parse_floats(str(merged["sinr"])),
            trials=int(merged.get("trials", 2000)),
            interferers=int(merged.get("interferers", 0)),
            seed=int(merged.get("seed", DEFAULT_SEED)),
            delay_window=int(merged.get("delay_window", 16)),
            search_window=int(merged.get("search_window", 17)),
            overlap=str(merged.get("overlap", "complete")),
            fractional_delay=str(merged.get("fractional_delay", "true")).lower()
            in ("1", "true", "yes"),
            calib_trials=int(merged.get("calib_trials", 20000)),
            target_pfa=float(merged.get("target_pfa", 1e-3)))
        result = sim.run_campaign(scenario)
        ext_label = sset.meta.get("extension", "")
        for p in result.points:
            rows.append([name, family, ext_label,
                         seqgen.FLOAT_FMT % p.sinr_db, seqgen.FLOAT_FMT % p.pd,
                         seqgen.FLOAT_FMT % p.time_rmse_s,
                         seqgen.FLOAT_FMT % p.freq_rmse_hz,
                         p.trials, scenario.seed])
    with open(out + ".csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "family", "extension", "sinr_db", "pd",
                    "time_rmse_s", "freq_rmse_hz", "trials", "seed"])
        w.writerows(rows)
    _write_manifest(out, "simulate", merged)
    return 0


def _add_common(p: _Parser) -> None:
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="cazackit")
    sub = parser.add_subparsers(dest="command")

    g = sub.add_parser("gen")
    _add_common(g)
    g.add_argument("--family")
    g.add_argument("--q", type=int)
    g.add_argument("--root", type=int)
    g.add_argument("--extend")
    g.add_argument("--n", type=int)
    g.add_argument("--split")
    g.add_argument("--policy")
    g.add_argument("--kind")
    g.add_argument("--count", type=int)

    a = sub.add_parser("analyze")
    _add_common(a)
    a.add_argument("--input")
    a.add_argument("--what")
    a.add_argument("--pair")
    a.add_argument("--split")

    m = sub.add_parser("ambiguity")
    _add_common(m)
    m.add_argument("--family")
    m.add_argument("--n", type=int)
    m.add_argument("--split")
    m.add_argument("--scs", type=float)
    m.add_argument("--nfft", type=int)
    m.add_argument("--grid")
    m.add_argument("--rx-shift", dest="rx_shift", type=int)
    m.add_argument("--ref-shift", dest="ref_shift", type=int)
    m.add_argument("--rx-doppler", dest="rx_doppler", type=float)
    m.add_argument("--coarse", type=float)
    m.add_argument("--narrow", action="store_const", const="true")

    s = sub.add_parser("simulate")
    _add_common(s)
    s.add_argument("--scenario")
    s.add_argument("--curves")
    s.add_argument("--sinr")
    s.add_argument("--trials", type=int)
    s.add_argument("--interferers", type=int)
    s.add_argument("--hyp")
    s.add_argument("--doppler")
    s.add_argument("--n", type=int)
    s.add_argument("--scs", type=float)
    s.add_argument("--nfft", type=int)
    s.add_argument("--delay-window", dest="delay_window", type=int)
    s.add_argument("--search-window", dest="search_window", type=int)
    s.add_argument("--overlap")
    s.add_argument("--calib-trials", dest="calib_trials", type=int)
    s.add_argument("--target-pfa", dest="target_pfa", type=float)

    sub.add_parser("version")
    return parser


_HANDLERS = {"gen": cmd_gen, "analyze": cmd_analyze,
             "ambiguity": cmd_ambiguity, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "version":
            print(f"cazackit {__version__}")
            return 0
        if args.command not in _HANDLERS:
            raise _UsageError("missing command; expected one of "
                              "gen/analyze/ambiguity/simulate/version")
        file_vals = _load_config(getattr(args, "config", None), args.command)
        resolved = _resolve(args, file_vals, {"seed": DEFAULT_SEED})
        if not resolved.get("out"):
            raise _UsageError("--out (or 'out' in the config file) is required")
        os.makedirs(os.path.dirname(str(resolved["out"])) or ".", exist_ok=True)
        if args.command == "analyze" and not resolved.get("input"):
            raise _UsageError("analyze requires --input")
        if args.command == "gen" and not resolved.get("family"):
            raise _UsageError("gen requires --family")
        return _HANDLERS[args.command](resolved)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
