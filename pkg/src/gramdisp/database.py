from contextlib import contextmanager
from functools import lru_cache
from typing import Iterator

from sqlalchemy import Column, DateTime, Float, Integer, String, Text, create_engine, func
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

# Declare a base class for declarative models
Base = declarative_base()


class EvaluationRun(Base):
    """
    SQLAlchemy model for one recorded evaluation run.
    """
    __tablename__ = "evaluation_runs"

    id = Column(Integer, primary_key=True, index=True)
    timestamp = Column(DateTime, default=func.now())
    fingerprint = Column(String, index=True, nullable=False)  # config digest
    corpus_digest = Column(String, index=True, nullable=False)
    n = Column(Integer, nullable=False)
    gold_size = Column(Integer, nullable=False)
    rho_entropy = Column(Float, nullable=True)
    rho_frequency = Column(Float, nullable=True)
    rho_types = Column(Float, nullable=True)
    p_entropy = Column(Float, nullable=True)
    p_frequency = Column(Float, nullable=True)
    p_types = Column(Float, nullable=True)
    report_json = Column(Text, nullable=False)

    def __repr__(self):
        return f"<EvaluationRun(id={self.id}, fingerprint='{self.fingerprint[:12]}', n={self.n})>"


@lru_cache(maxsize=None)
def get_engine(url: str) -> Engine:
    """Engine per ledger URL; tables are created on first use."""
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    engine = create_engine(url, connect_args=connect_args)
    Base.metadata.create_all(bind=engine)
    return engine


@contextmanager
def get_db(url: str) -> Iterator[Session]:
    """
    Provides a database session for the ledger at `url`.
    Ensures the session is closed after use.
    """
    db = sessionmaker(autocommit=False, autoflush=False, bind=get_engine(url))()
    try:
        yield db
    finally:
        db.close()
