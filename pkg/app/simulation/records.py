"""
Records - Построчная запись траектории
======================================

Порядок колонок фиксирован:
t, x[0..n), u[0..m), alpha[0..p), gamma, eps_hat, rho, objective,
затем (при включённой диагностике) REGRET_COLUMNS.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from app.diagnostics.regret import RegretReport

SCALAR_COLUMNS = ("gamma", "eps_hat", "rho", "objective")
REGRET_COLUMNS = (
    "regret_bound",
    "regret_realized",
    "regret_std_error",
    "w_t",
    "f_t",
    "a_mu",
    "l_eps_hat",
    "w_bound_global",
    "w_bound_moving",
    "rho_alternate",
)


def trajectory_columns(n: int, m: int, p: int, regret: bool = False) -> List[str]:
    columns = ["t"]
    columns += [f"x[{i}]" for i in range(n)]
    columns += [f"u[{i}]" for i in range(m)]
    columns += [f"alpha[{i}]" for i in range(p)]
    columns += list(SCALAR_COLUMNS)
    if regret:
        columns += list(REGRET_COLUMNS)
    return columns


@dataclass
class StepRow:
    """Одна строка траектории"""
    t: int
    x: np.ndarray
    u: np.ndarray
    alpha: np.ndarray
    gamma: float
    eps_hat: float
    rho: float
    objective: float
    rho_alternate: float = float("nan")
    regret: Optional[RegretReport] = None

    def values(self, with_regret: bool) -> List[float]:
        row = [float(v) for v in (*self.x, *self.u, *self.alpha)]
        row += [self.gamma, self.eps_hat, self.rho, self.objective]
        if with_regret:
            r = self.regret
            if r is None:
                row += [float("nan")] * (len(REGRET_COLUMNS) - 1)
            else:
                row += [
                    r.bound,
                    r.realized,
                    r.realized_se,
                    r.w_t,
                    r.f_t,
                    r.a_mu,
                    r.l_eps_hat,
                    r.w_bound_global,
                    r.w_bound_moving,
                ]
            row.append(self.rho_alternate)
        return [float(v) for v in row]


@dataclass
class TrajectoryRecord:
    """Траектория прогона: строки t = 1..horizon (или до места обрыва)"""
    n: int
    m: int
    p: int
    regret: bool = False
    t: List[int] = field(default_factory=list)
    rows: List[List[float]] = field(default_factory=list)
    truncated: bool = False

    @property
    def columns(self) -> List[str]:
        return trajectory_columns(self.n, self.m, self.p, self.regret)

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: StepRow) -> None:
        if self.t and row.t <= self.t[-1]:
            raise ValueError(f"rows must have increasing t, got {row.t} after {self.t[-1]}")
        self.t.append(int(row.t))
        self.rows.append(row.values(self.regret))

    @property
    def last_step(self) -> int:
        return self.t[-1] if self.t else 0

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=self.columns[1:], dtype=float)
        frame.insert(0, "t", np.asarray(self.t, dtype=np.int64))
        return frame

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name) - 1
        return np.array([row[index] for row in self.rows], dtype=float)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, truncated: bool = False) -> "TrajectoryRecord":
        """Обратное преобразование (размерности восстанавливаются по именам колонок)"""
        names = list(frame.columns)
        n = sum(1 for c in names if c.startswith("x["))
        m = sum(1 for c in names if c.startswith("u["))
        p = sum(1 for c in names if c.startswith("alpha["))
        record = cls(n=n, m=m, p=p, regret=REGRET_COLUMNS[0] in names, truncated=truncated)
        if names != record.columns:
            raise ValueError(f"unexpected column order: {names}")
        record.t = [int(v) for v in frame["t"].to_numpy()]
        record.rows = frame[names[1:]].to_numpy(dtype=float).tolist()
        return record

    def to_dict(self) -> Dict:
        return {
            "columns": self.columns,
            "rows": [[t, *row] for t, row in zip(self.t, self.rows)],
            "truncated": self.truncated,
        }
