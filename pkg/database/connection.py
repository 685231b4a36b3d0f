"""
database/connection.py
Async SQLite engine for the run ledger, session factory and table setup.
"""

from functools import lru_cache
from typing import Optional

from sqlalchemy.ext.asyncio import AsyncEngine, AsyncSession, create_async_engine
from sqlalchemy.orm import sessionmaker
from sqlmodel import SQLModel

from core.config import get_settings


@lru_cache
def get_engine(url: Optional[str] = None) -> AsyncEngine:
    """One engine per URL; defaults to ``Settings.LEDGER_DATABASE_URL``."""
    return create_async_engine(
        url or get_settings().LEDGER_DATABASE_URL,
        echo=False,
        connect_args={"check_same_thread": False},
    )


def session_factory(url: Optional[str] = None) -> sessionmaker:
    return sessionmaker(
        get_engine(url),
        class_=AsyncSession,
        expire_on_commit=False,
    )


async def init_db(url: Optional[str] = None) -> None:
    """Create all tables if they don't already exist."""
    import database.models  # noqa: F401  registers tables with SQLModel metadata

    async with get_engine(url).begin() as conn:
        await conn.run_sync(SQLModel.metadata.create_all)

