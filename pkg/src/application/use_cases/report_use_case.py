"""
Report Use Case.
"""
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from src.application.dtos.pipeline_dto import ReportResultDTO
from src.domain.repositories import ArtifactRepository
from src.domain.services.metrics import MetricSummary, mean_std, merge
from src.infrastructure.config.logging import logger

METRICS = ("sr", "spl", "tl", "tl_m", "ne")
MARKDOWN_COLUMNS = ("SR(%)↑", "SPL(%)↑", "TL↓", "NE↓")
MARKDOWN_METRICS = ("sr", "spl", "tl", "ne")
SPLIT_HEADER = ["split", "variant", "n_seeds"] + [f"{m}_{s}" for m in ("SR", "SPL", "TL", "TL_m", "NE") for s in ("mean", "std")]


def _summary(row: Dict[str, str]) -> MetricSummary:
    return MetricSummary(
        sr=float(row["SR"]),
        spl=float(row["SPL"]),
        tl=float(row["TL"]),
        tl_m=float(row["TL_m"]),
        ne=float(row["NE"]),
        n_episodes=int(row["n_episodes"])
    )


def _cell(values: List[float]) -> str:
    mean, std = mean_std(values)
    return f"{mean:.2f} ± {std:.2f}"


def _table(header: List[str], rows: List[List[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return lines


class ReportUseCase:
    """Use case for merging per-seed evaluation tables into a report."""

    def __init__(self, artifact_repository: ArtifactRepository):
        self.artifact_repository = artifact_repository

    def collect_rows(self) -> List[Dict[str, str]]:
        files = self.artifact_repository.list("results/*/seed_*.csv")
        if not files:
            raise ValueError("No evaluation results found under results/; run eval first")
        rows = []
        for path in files:
            rows.extend(self.artifact_repository.read_table(path))
        return rows

    def execute(self, out_dir: Optional[str] = None) -> ReportResultDTO:
        """Write ``report.csv`` and ``report.md`` with mean ± sample std over seeds."""
        rows = self.collect_rows()
        warnings = []

        variants_by_seed: Dict[str, set] = defaultdict(set)
        for row in rows:
            variants_by_seed[row["seed"]].add(row["variant"])
        variant_sets = {frozenset(v) for v in variants_by_seed.values()}
        if len(variant_sets) > 1:
            detail = "; ".join(f"seed {s}: {sorted(v)}" for s, v in sorted(variants_by_seed.items()))
            warnings.append(f"Inconsistent variant sets across seeds ({detail}); table is partial")

        # (split, variant) -> seed -> merged summary
        per_split: Dict[Tuple[str, str], Dict[str, MetricSummary]] = defaultdict(dict)
        grouped: Dict[Tuple[str, str, str], List[MetricSummary]] = defaultdict(list)
        per_scene: Dict[Tuple[str, str, str], List[MetricSummary]] = defaultdict(list)
        for row in rows:
            summary = _summary(row)
            grouped[(row["split"], row["variant"], row["seed"])].append(summary)
            per_scene[(row["split"], row["scene"], row["variant"])].append(summary)
        for (split, variant, seed), summaries in grouped.items():
            per_split[(split, variant)][seed] = merge(summaries)

        csv_rows, split_md, scene_md = [], [], []
        for (split, variant), by_seed in sorted(per_split.items()):
            seeds = [by_seed[s] for s in sorted(by_seed)]
            csv_row = [split, variant, len(seeds)]
            for metric in METRICS:
                csv_row.extend(mean_std(getattr(s, metric) for s in seeds))
            csv_rows.append(csv_row)
            split_md.append([split, variant, str(len(seeds))] + [
                _cell([getattr(s, m) for s in seeds]) for m in MARKDOWN_METRICS
            ])
        for (split, scene, variant), summaries in sorted(per_scene.items()):
            scene_md.append([split, scene, variant] + [
                _cell([getattr(s, m) for s in summaries]) for m in MARKDOWN_METRICS
            ])

        out_dir = out_dir or "."
        csv_path = self.artifact_repository.write_table(f"{out_dir}/report.csv", SPLIT_HEADER, csv_rows)
        lines = ["# Navigation results", "", "Mean ± sample standard deviation over seeds.", ""]
        lines += _table(["Split", "Variant", "Seeds", *MARKDOWN_COLUMNS], split_md)
        lines += ["", "## Per scene", ""]
        lines += _table(["Split", "Scene", "Variant", *MARKDOWN_COLUMNS], scene_md)
        if warnings:
            lines += ["", "## Warnings", ""] + [f"- {w}" for w in warnings]
        md_path = self.artifact_repository.write_text(f"{out_dir}/report.md", "\n".join(lines) + "\n")

        for warning in warnings:
            logger.warning(warning)
        logger.info(f"Report over {len(csv_rows)} split/variant rows written to {md_path}")
        return ReportResultDTO(csv_path=csv_path, markdown_path=md_path, rows=len(csv_rows), warnings=warnings)
