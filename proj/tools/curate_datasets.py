#!/usr/bin/env python3
"""Rebuilds data/<lib>/ from `dabc mine` output over released source trees.

usage: curate_datasets.py SKLEARN_MINED PANDAS_MINED NUMPY_MINED OUT_DIR

Each *_MINED directory holds dabc.jsonl and signatures.json produced by
`dabc mine` on scikit-learn 1.1.2, pandas 1.5.3 and numpy 1.24.3 with the
matching --url-base. Records the miner leaves in needs_review are resolved
here by hand, one entry per record, so every resolution is reviewable.
"""
import json
import sys
from pathlib import Path

SKLEARN_ARGS = {
    "gamma", "cv", "n_jobs", "max_features", "n_estimators", "multi_class", "solver",
    "decision_function_shape", "return_train_score", "algorithm", "n_splits", "init", "multioutput",
}

# (class, function, argument, version) -> (old, new); None keeps the field absent
SKLEARN_RESOLVED = {
    (None, "k_means", "algorithm", "1.1"): ('"auto"', '"lloyd"'),
    ("KMeans", "__init__", "algorithm", "1.1"): ('"auto"', '"lloyd"'),
    (None, "non_negative_factorization", "init", "1.1"): ("'nndsvd'", "'nndsvda'"),
    ("NMF", "__init__", "init", "1.1"): ("'nndsvd'", "'nndsvda'"),
    (None, "r2_score", "multioutput", "0.19"): ("'variance_weighted'", "'uniform_average'"),
    ("SVC", "__init__", "decision_function_shape", "0.19"): ("'ovo'", "'ovr'"),
    ("NuSVC", "__init__", "decision_function_shape", "0.19"): ("'ovo'", "'ovr'"),
}

PANDAS_RECORDS = {
    ("DataFrame", "to_gbq", "auth_local_webserver"): ("False", "True"),
    (None, "read_gbq", "auth_local_webserver"): ("False", "True"),
    (None, "concat", "sort"): (None, "False"),
    ("DataFrame", "append", "sort"): (None, "False"),
    (None, "read_json", "convert_axes"): (None, None),
    ("DatetimeIndex", "to_series", "keep_tz"): (None, "True"),
    ("Styler", "bar", "align"): (None, None),
    ("Styler", "to_latex", "hrules"): (None, None),
    ("Series", "between", "inclusive"): (None, None),
    (None, "to_datetime", "cache"): ("False", "True"),
    ("NDFrame", "interpolate", "limit_direction"): (None, None),
}

# The numpy table names two locations differently from the source tree:
# argsort is a MaskedArray method and load is a module-level function.
# The table's names are kept; signatures are aliased to the real defs.
NUMPY_RECORDS = [
    # (class, function, argument, version, source path, source line, signature key, static)
    ("MaskedArrayFutureWarning", "argsort", "axis", "1.13.0", "numpy/ma/core.py", 5507, "MaskedArray.argsort", False),
    ("NpzFile", "__init__", "allow_pickle", "1.16.3", "numpy/lib/npyio.py", 135, "NpzFile.__init__", False),
    ("NpzFile", "load", "allow_pickle", "1.16.3", "numpy/lib/npyio.py", 295, "load", True),
    (None, "read_array", "allow_pickle", "1.16.3", "numpy/lib/format.py", 743, "read_array", False),
    (None, "lstsq", "rcond", "1.14.0", "numpy/linalg/linalg.py", 2178, "lstsq", False),
]
NUMPY_MESSAGES = {
    "numpy/ma/core.py": "Previously, the default was documented to be -1, but that was in error. At some future "
                        "date, the default will change to -1, as originally intended. Until then, the axis should "
                        "be given explicitly when ``arr.ndim > 1``, to avoid a FutureWarning.",
}

MAPPINGS = {
    "sklearn": [
        ("sklearn/datasets/", "Dataset"),
        ("sklearn/preprocessing/", "Data preprocessing"),
        ("sklearn/impute/", "Data preprocessing"),
        ("sklearn/decomposition/", "Data Decomposition"),
        ("sklearn/cross_decomposition/", "Data Decomposition"),
        ("sklearn/covariance/", "Data Analysis"),
        ("sklearn/inspection/", "Data Analysis"),
        ("sklearn/feature_selection/", "Feature Processing"),
        ("sklearn/feature_extraction/", "Feature Processing"),
        ("sklearn/calibration.py", "Model Training"),
        ("sklearn/cluster/", "Model Training"),
        ("sklearn/discriminant_analysis.py", "Model Training"),
        ("sklearn/dummy.py", "Model Training"),
        ("sklearn/ensemble/", "Model Training"),
        ("sklearn/gaussian_process/", "Model Training"),
        ("sklearn/isotonic.py", "Model Training"),
        ("sklearn/kernel_approximation.py", "Model Training"),
        ("sklearn/kernel_ridge.py", "Model Training"),
        ("sklearn/linear_model/", "Model Training"),
        ("sklearn/manifold/", "Model Training"),
        ("sklearn/mixture/", "Model Training"),
        ("sklearn/multiclass.py", "Model Training"),
        ("sklearn/multioutput.py", "Model Training"),
        ("sklearn/naive_bayes.py", "Model Training"),
        ("sklearn/neighbors/", "Model Training"),
        ("sklearn/neural_network/", "Model Training"),
        ("sklearn/semi_supervised/", "Model Training"),
        ("sklearn/svm/", "Model Training"),
        ("sklearn/tree/", "Model Training"),
        ("sklearn/model_selection/", "Model Evaluation"),
        ("sklearn/metrics/", "Model Evaluation"),
        ("sklearn/utils/", "Utils"),
        ("sklearn/pipeline.py", "Pipeline"),
        ("sklearn/compose/", "Pipeline"),
    ],
    "pandas": [
        ("pandas/core/frame.py", "DataFrame"),
        ("pandas/core/generic.py", "DataFrame"),
        ("pandas/core/series.py", "Series"),
        ("pandas/core/indexes/", "Index Objects"),
        ("pandas/core/reshape/", "General Functions"),
        ("pandas/core/tools/", "General Functions"),
        ("pandas/io/", "Input/Output"),
        ("pandas/io/formats/style.py", "Style"),
    ],
    "numpy": [
        ("numpy/ma/", "Masked Arrays"),
        ("numpy/lib/npyio.py", "General Functions"),
        ("numpy/lib/format.py", "General Functions"),
        ("numpy/linalg/", "Linear Algebra"),
    ],
}

URL_BASES = {
    "sklearn": "https://github.com/scikit-learn/scikit-learn/blob/1.1.2",
    "pandas": "https://github.com/pandas-dev/pandas/blob/v1.5.3",
    "numpy": "https://github.com/numpy/numpy/blob/v1.24.3",
}

KEY_ORDER = ["dabc_msg", "version", "path", "class", "function", "argument", "dabc_url", "change_kind",
             "old_default", "new_default", "reason", "effect"]


def load_records(mined):
    with open(Path(mined) / "dabc.jsonl", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def load_signatures(mined):
    with open(Path(mined) / "signatures.json", encoding="utf-8") as f:
        return json.load(f)


def ordered(rec):
    return {k: rec[k] for k in KEY_ORDER if rec.get(k) is not None}


def sig_key(rec):
    return (rec["class"] + "." if rec.get("class") else "") + rec["function"]


def set_defaults(rec, old, new):
    rec.pop("old_default", None)
    rec.pop("new_default", None)
    if old is not None:
        rec["old_default"] = old
    if new is not None:
        rec["new_default"] = new


def curate_sklearn(mined):
    out = []
    for r in load_records(mined):
        if r.get("argument") not in SKLEARN_ARGS or r["function"].startswith("_") and r["function"] != "__init__":
            continue
        key = (r.get("class"), r["function"], r["argument"], r["version"])
        if key in SKLEARN_RESOLVED:
            r["change_kind"] = "default_value_change"
            set_defaults(r, *SKLEARN_RESOLVED[key])
        elif r["change_kind"] != "default_value_change":
            continue
        out.append(r)
    return out


def curate_pandas(mined):
    out = []
    for r in load_records(mined):
        key = (r.get("class"), r.get("function"), r.get("argument"))
        if key not in PANDAS_RECORDS:
            continue
        r["change_kind"] = "default_value_change"
        set_defaults(r, *PANDAS_RECORDS[key])
        out.append(r)
    if len(out) != len(PANDAS_RECORDS):
        sys.exit(f"pandas: expected {len(PANDAS_RECORDS)} records, found {len(out)}")
    return out


def curate_numpy(mined):
    by_line = {(r["path"], int(r["dabc_url"].rsplit("#L", 1)[1])): r for r in load_records(mined)}
    out = []
    for cls, fn, arg, version, path, line, _, _ in NUMPY_RECORDS:
        src = by_line.get((path, line))
        msg = src["dabc_msg"] if src else NUMPY_MESSAGES[path]
        rec = {"dabc_msg": msg, "version": version, "path": path, "class": cls, "function": fn, "argument": arg,
               "dabc_url": f"{URL_BASES['numpy']}/{path}#L{line}", "change_kind": "default_value_change"}
        if arg == "allow_pickle":
            set_defaults(rec, "True", "False")
        out.append(rec)
    return out


def signatures_for(records, sigs, label, aliases=None, static=()):
    entries, statics = {}, []
    aliases = aliases or {}
    for r in records:
        key = sig_key(r)
        src = aliases.get(key, key)
        if src not in sigs["entries"]:
            sys.exit(f"{label}: no signature for {src}")
        entries[key] = sigs["entries"][src]
        if key in static or (src in sigs.get("staticmethods", []) and key == src):
            statics.append(key)
    return {"label": label, "entries": dict(sorted(entries.items())), "staticmethods": sorted(set(statics))}


def write(out_dir, lib, records, signatures):
    d = Path(out_dir) / lib
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "dabc.jsonl", "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(ordered(r), ensure_ascii=False, separators=(",", ":")) + "\n")
    with open(d / "signatures.json", "w", encoding="utf-8") as f:
        json.dump(signatures, f, indent=1, ensure_ascii=False)
        f.write("\n")
    with open(d / "modules.json", "w", encoding="utf-8") as f:
        json.dump([{"prefix": p, "module": m} for p, m in MAPPINGS[lib]], f, indent=1)
        f.write("\n")


def main():
    if len(sys.argv) != 5:
        sys.exit(__doc__)
    sk_dir, pd_dir, np_dir, out_dir = sys.argv[1:]

    sk = curate_sklearn(sk_dir)
    write(out_dir, "sklearn", sk, signatures_for(sk, load_signatures(sk_dir), "scikit-learn-1.1.2"))

    pd_ = curate_pandas(pd_dir)
    write(out_dir, "pandas", pd_, signatures_for(pd_, load_signatures(pd_dir), "pandas-1.5.3"))

    np_ = curate_numpy(np_dir)
    aliases = {sig_key({"class": c, "function": f}): k for c, f, _, _, _, _, k, _ in NUMPY_RECORDS}
    static = {sig_key({"class": c, "function": f}) for c, f, _, _, _, _, _, s in NUMPY_RECORDS if s}
    write(out_dir, "numpy", np_, signatures_for(np_, load_signatures(np_dir), "numpy-1.24.3", aliases, static))


if __name__ == "__main__":
    main()
