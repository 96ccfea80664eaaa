import datetime
import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict
from sqlalchemy.orm import Session

from gramdisp.database import EvaluationRun
from gramdisp.evalreport import EvalReport

logger = logging.getLogger(__name__)

# --- Pydantic Models (ledger schemas) ---


class EvaluationRunBase(BaseModel):
    fingerprint: str
    corpus_digest: str
    n: int
    gold_size: int
    rho_entropy: Optional[float] = None
    rho_frequency: Optional[float] = None
    rho_types: Optional[float] = None
    p_entropy: Optional[float] = None
    p_frequency: Optional[float] = None
    p_types: Optional[float] = None


class EvaluationRunCreate(EvaluationRunBase):
    report_json: str

    @classmethod
    def from_report(cls, report: EvalReport) -> "EvaluationRunCreate":
        return cls(
            fingerprint=report.fingerprint,
            corpus_digest=report.corpus_digest,
            n=report.n,
            gold_size=report.gold_size,
            rho_entropy=report.rho["entropy"].rho,
            rho_frequency=report.rho["frequency"].rho,
            rho_types=report.rho["types"].rho,
            p_entropy=report.rho["entropy"].p_two_tailed,
            p_frequency=report.rho["frequency"].p_two_tailed,
            p_types=report.rho["types"].p_two_tailed,
            report_json=report.model_dump_json(),
        )


class EvaluationRunResponse(EvaluationRunBase):
    model_config = ConfigDict(from_attributes=True)

    id: int
    timestamp: datetime.datetime


# --- CRUD Operations for the run ledger ---


def create_run(db: Session, run: EvaluationRunCreate) -> EvaluationRunResponse:
    """Stores one evaluation run."""
    db_run = EvaluationRun(**run.model_dump())
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    logger.info("Recorded run %d (fingerprint %s)", db_run.id, db_run.fingerprint[:12])
    return EvaluationRunResponse.model_validate(db_run)


def get_runs(
    db: Session, fingerprint: Optional[str] = None, skip: int = 0, limit: int = 100
) -> List[EvaluationRunResponse]:
    """Lists recorded runs, newest first, optionally for one config fingerprint."""
    query = db.query(EvaluationRun)
    if fingerprint:
        query = query.filter(EvaluationRun.fingerprint == fingerprint)
    rows = query.order_by(EvaluationRun.id.desc()).offset(skip).limit(limit).all()
    return [EvaluationRunResponse.model_validate(row) for row in rows]


def get_report(db: Session, run_id: int) -> Optional[EvalReport]:
    """The full structured report of a run."""
    row = db.get(EvaluationRun, run_id)
    if row is None:
        return None
    return EvalReport.model_validate_json(row.report_json)
