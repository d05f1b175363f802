"""
Experiment Engine - Turns validated configs into result tables
Every run returns a pandas DataFrame whose columns match the CSV schema of its command
"""

import logging
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

import config
from descriptors import EmbedConfig, ExperimentConfig, HbDescriptorModel, NormsConfig, build_scheme
from diagnostics import divergence_trend, lebesgue_constant
from embedding import (
    check_injectivity,
    check_isometry,
    check_monomial_norms,
    inclusion_constant,
    membership_beyond_disk,
    verify_inclusion_bound,
)
from errors import DivergentEvidence, TailNotControlled
from spaces import FunctionSpace, check_weight_admissible

logger = logging.getLogger(__name__)

NORMS_COLUMNS = ["n", "monomial_norm"]
SCHEME_RUN_COLUMNS = ["input", "n", "error_norm", "image_norm", "lower_opnorm", "upper_opnorm", "tag"]
LEBESGUE_COLUMNS = ["n", "L_n"]
EMBED_COLUMNS = ["check", "parameter", "value", "bound", "flag"]
HB_GRAM_COLUMNS = ["j", "k", "re", "im"]


class ExperimentEngine:
    """Runs one experiment per call; built spaces are cached by descriptor."""

    def __init__(self, seed: Optional[int] = None):
        self.seed = config.DEFAULT_SEED if seed is None else int(seed)
        self._spaces: Dict[str, FunctionSpace] = {}

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def close(self):
        """Drop cached spaces (Gram factors can be large)."""
        self._spaces.clear()

    def space_for(self, descriptor) -> FunctionSpace:
        key = descriptor.model_dump_json()
        if key not in self._spaces:
            start = time.perf_counter()
            self._spaces[key] = descriptor.build()
            logger.info("Built %s space in %.3fs", descriptor.kind, time.perf_counter() - start)
        return self._spaces[key]

    # ---------- norms ----------

    def run_norms(self, cfg: NormsConfig) -> pd.DataFrame:
        space = self.space_for(cfg.space)
        n_max = space.horizon if cfg.n_max is None else cfg.n_max
        norms = space.monomial_norms(n_max)
        return pd.DataFrame({"n": np.arange(n_max + 1), "monomial_norm": norms}, columns=NORMS_COLUMNS)

    # ---------- scheme-run ----------

    def run_scheme(self, cfg: ExperimentConfig) -> pd.DataFrame:
        space = self.space_for(cfg.space)
        scheme = build_scheme(cfg.scheme, space)
        seed = self.seed if cfg.seed is None else cfg.seed

        rows: List[Dict[str, Any]] = []
        for index, item in enumerate(cfg.inputs):
            label = item.name or f"{item.kind}-{index}"
            rng = np.random.default_rng([seed, index])
            f = item.build(space.horizon, rng)
            trend = divergence_trend(space, scheme, f, cfg.n_max, cfg.n_min, cfg.opnorm_trials, seed)
            logger.info("Input %s: trend %s over n = %d..%d", label, trend["tag"], cfg.n_min, cfg.n_max)

            columns = zip(trend["n"], trend["error_norms"], trend["image_norms"], trend["opnorms"])
            for n, error, image, estimate in columns:
                lower, upper = np.nan, np.nan
                if estimate is not None:
                    lower = estimate.lower
                    upper = np.nan if estimate.upper is None else estimate.upper
                rows.append({
                    "input": label,
                    "n": n,
                    "error_norm": error,
                    "image_norm": image,
                    "lower_opnorm": lower,
                    "upper_opnorm": upper,
                    "tag": trend["tag"],
                })
        return pd.DataFrame(rows, columns=SCHEME_RUN_COLUMNS)

    # ---------- lebesgue ----------

    def run_lebesgue(self, n_list: Sequence[int], quadrature: Optional[int] = None) -> pd.DataFrame:
        values = [lebesgue_constant(n, quadrature) for n in n_list]
        return pd.DataFrame({"n": list(n_list), "L_n": values}, columns=LEBESGUE_COLUMNS)

    # ---------- embed ----------

    def run_embed(self, cfg: EmbedConfig) -> pd.DataFrame:
        spec = cfg.spec.build()
        rows: List[Dict[str, Any]] = []

        def add(check, parameter, value, bound, flag):
            rows.append({"check": check, "parameter": parameter, "value": value, "bound": bound, "flag": flag})

        admissible = check_weight_admissible(spec.weights)
        add("admissibility", admissible["threshold"], admissible["tail_max_deviation"],
            admissible["threshold"], "passes" if admissible["passes"] else "fails")

        for r in cfg.r_list:
            try:
                result = inclusion_constant(spec, r)
            except TailNotControlled as e:
                logger.warning("%s", e)
                add("inclusion_constant", r, np.nan, np.nan, e.name)
                continue
            add("inclusion_constant", r, result["value"], result["tail_bound"],
                "tail-negligible" if result["tail_negligible"] else "tail-not-negligible")
            verified = verify_inclusion_bound(spec, cfg.samples, r, seed=self.seed)
            add("inclusion_bound", r, verified["max_ratio"], verified["C_r"],
                "holds" if verified["holds"] else "violated")

        isometry = check_isometry(spec, cfg.samples, seed=self.seed)
        add("isometry", cfg.samples, isometry["max_relative_deviation"], 1e-12,
            "holds" if isometry["holds"] else "violated")
        monomials = check_monomial_norms(spec)
        add("monomial_norms", spec.horizon, monomials["max_relative_deviation"], 1e-12,
            "holds" if monomials["holds"] else "violated")
        injective = check_injectivity(spec)
        add("injectivity", spec.horizon, len(injective["failures"]), 0,
            "holds" if injective["holds"] else "violated")

        for target in cfg.membership:
            try:
                result = membership_beyond_disk(spec, target.coefficients(spec.horizon), target.R)
            except DivergentEvidence as e:
                logger.warning("%s", e)
                add(f"membership:{target.name}", target.R, np.nan, np.nan, e.name)
                continue
            add(f"membership:{target.name}", target.R, result["bound"], result["tail_bound"], "member")

        return pd.DataFrame(rows, columns=EMBED_COLUMNS)

    # ---------- hb-gram ----------

    def run_hb_gram(self, cfg: HbDescriptorModel) -> pd.DataFrame:
        descriptor = cfg.descriptor()
        G = descriptor.gram.entries
        j, k = np.indices(G.shape)
        return pd.DataFrame(
            {"j": j.ravel(), "k": k.ravel(), "re": G.real.ravel(), "im": G.imag.ravel()},
            columns=HB_GRAM_COLUMNS,
        )
