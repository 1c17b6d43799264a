from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict

from src.core.enums import AttackKind, EmbedMode
from src.core.models import (
    AttackSpec,
    EmbedConfig,
    ExperimentGrid,
    GrayImage,
    ReportRow,
    SecretKey,
    Watermark,
)
from src.core.utils import psnr, similarity
from src.infrastructure.logging.logger import setup_logger
from src.services.attack_service import apply_attack
from src.services.report_interfaces import AbstractArtifactStore, AbstractReportWriter
from src.services.watermark_service import embed, expected_flip_pattern, extract

logger = setup_logger(__name__)


class EvaluationTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: AttackSpec
    authenticated: bool
    seed: Optional[int] = None


class PreparedMode(BaseModel):
    """Watermarked carrier and the mark extraction should return, per mode."""

    model_config = ConfigDict(frozen=True)

    key: SecretKey
    watermarked: Optional[GrayImage] = None
    reference: Optional[Watermark] = None
    error: Optional[str] = None


def mode_name(authenticated: bool) -> str:
    return "authenticated" if authenticated else "unauthenticated"


def plan_tasks(grid: ExperimentGrid) -> list[EvaluationTask]:
    """Rows in declared order: attack setting, then mode, then trial."""
    modes = list(dict.fromkeys(grid.modes))
    tasks: list[EvaluationTask] = []
    for spec in grid.attacks:
        for authenticated in modes:
            if spec.kind is AttackKind.GAUSSIAN:
                for trial in range(grid.trials):
                    seed = spec.seed + trial
                    tasks.append(
                        EvaluationTask(
                            spec=spec.model_copy(update={"seed": seed}),
                            authenticated=authenticated,
                            seed=seed,
                        )
                    )
            else:
                tasks.append(EvaluationTask(spec=spec, authenticated=authenticated))
    return tasks


class EvaluationService:
    def __init__(
        self,
        report_writers: Sequence[AbstractReportWriter],
        artifact_store: Optional[AbstractArtifactStore] = None,
        workers: int = 1,
    ):
        if workers < 1:
            raise ValueError("at least one worker is needed")
        self.report_writers = list(report_writers)
        self.artifact_store = artifact_store
        self.workers = workers

    def prepare(
        self,
        grid: ExperimentGrid,
        carrier: GrayImage,
        watermark: Watermark,
        authenticated: bool,
    ) -> PreparedMode:
        key = grid.key.model_copy(update={"authenticated": authenticated})
        config = grid.embed_config
        try:
            watermarked = embed(carrier, watermark, key, config)
            if config.mode is EmbedMode.NEGATE:
                reference = expected_flip_pattern(
                    carrier, key, config, (watermark.width, watermark.height)
                )
            else:
                reference = watermark
        except Exception as e:
            logger.error(
                f"Embedding failed ({mode_name(authenticated)}): {e}", exc_info=True
            )
            return PreparedMode(key=key, error=str(e))

        if self.artifact_store is not None:
            self.artifact_store.save_image(
                f"watermarked_{mode_name(authenticated)}", watermarked
            )
        logger.debug(
            f"Watermarked carrier ready ({mode_name(authenticated)}), "
            f"PSNR {psnr(carrier, watermarked):.2f} dB"
        )
        return PreparedMode(key=key, watermarked=watermarked, reference=reference)

    def evaluate_task(
        self,
        task: EvaluationTask,
        prepared: PreparedMode,
        carrier: GrayImage,
        config: EmbedConfig,
    ) -> ReportRow:
        row_id = f"{task.spec.label}_{mode_name(task.authenticated)}"
        if task.seed is not None:
            row_id += f"_{task.seed}"
        failed = ReportRow(
            attack=task.spec.kind,
            parameter=task.spec.parameter,
            authenticated=task.authenticated,
            seed=task.seed,
            error=prepared.error,
        )
        if prepared.watermarked is None or prepared.reference is None:
            return failed

        try:
            attacked = apply_attack(prepared.watermarked, task.spec)
            reference = prepared.reference
            extracted = extract(
                attacked,
                prepared.key,
                config,
                (reference.width, reference.height),
                original=carrier if config.mode is EmbedMode.NEGATE else None,
            )
            report = similarity(extracted, reference)
            if self.artifact_store is not None:
                self.artifact_store.save_image(row_id, attacked)
                self.artifact_store.save_watermark(row_id, extracted)
            row = ReportRow(
                attack=task.spec.kind,
                parameter=task.spec.parameter,
                authenticated=task.authenticated,
                similarity_pct=report.percentage,
                psnr_db=psnr(attacked, prepared.watermarked),
                seed=task.seed,
            )
        except Exception as e:
            logger.warning(f"Row {row_id} failed: {e}")
            return failed.model_copy(update={"error": str(e)})

        logger.debug(f"Row {row_id}: similarity {report.percentage:.2f}%")
        return row

    def run(
        self, grid: ExperimentGrid, carrier: GrayImage, watermark: Watermark
    ) -> list[ReportRow]:
        prepared = {
            authenticated: self.prepare(grid, carrier, watermark, authenticated)
            for authenticated in dict.fromkeys(grid.modes)
        }
        tasks = plan_tasks(grid)
        logger.info(f"Evaluating {len(tasks)} rows on {self.workers} worker(s)")

        def run_task(task: EvaluationTask) -> ReportRow:
            return self.evaluate_task(
                task, prepared[task.authenticated], carrier, grid.embed_config
            )

        # map() yields in submission order whatever the completion order
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            rows = list(pool.map(run_task, tasks))

        failures = sum(row.failed for row in rows)
        if failures:
            logger.warning(f"{failures} of {len(rows)} rows failed")
        for writer in self.report_writers:
            writer.write(rows)
        logger.info(f"Evaluation finished: {len(rows)} rows, {failures} failed")
        return rows
