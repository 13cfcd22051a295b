"""
Модели данных для selmer CLI, симулятора и хранилища форм.

Содержит dataclass-определения для конфигурации команд и сохранённых записей.
"""

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Optional

from .cubicforms import CubicForm, FormClassRecord
from .errors import InadmissibleError

SCHEMA_VERSION = 1


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    JSON = "json"


COMMANDS = (
    "tables",
    "mass-check",
    "class-list",
    "witt-selftest",
    "simulate",
    "cubic-sample",
    "cubic-scan",
    "identity-check",
)


@dataclass
class CommandConfig:
    """
    Проверенные параметры одного вызова CLI.

    Attributes:
        command: Имя команды, одно из COMMANDS
        r1: Число вещественных мест (нечётное), если команда принимает сигнатуру
        r2: Число комплексных мест
        q: Размер поля для формул порядков, степень 2
        D: Граница дискриминанта для cubic-scan
        X: Граница высоты для cubic-sample
        trials: Число случайных испытаний
        seed: Главный seed, выводится в каждом отчёте
        eps: Целевая точность для усечённых вещественных значений
        output_format: text, csv или json
        output_path: Файл для вывода вместо stdout
        threads: Число рабочих процессов
    """
    command: str
    r1: Optional[int] = None
    r2: Optional[int] = None
    q: int = 2
    D: Optional[int] = None
    X: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 0
    eps: float = 1e-9
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[str] = None
    threads: int = 1

    def __post_init__(self) -> None:
        """Валидация данных после инициализации."""
        if self.command not in COMMANDS:
            raise InadmissibleError(f"unknown command {self.command!r}")
        self.output_format = OutputFormat(self.output_format)
        if self.r1 is not None and (self.r1 < 1 or self.r1 % 2 == 0):
            raise InadmissibleError(f"r1 must be a positive odd number, got {self.r1}")
        if self.r2 is not None and self.r2 < 0:
            raise InadmissibleError(f"r2 must be >= 0, got {self.r2}")
        if self.q < 2 or self.q & (self.q - 1):
            raise InadmissibleError(f"q must be a power of 2, got {self.q}")
        if self.D is not None and self.D < 1:
            raise InadmissibleError(f"D must be >= 1, got {self.D}")
        if self.X is not None and self.X < 1:
            raise InadmissibleError(f"X must be >= 1, got {self.X}")
        if self.trials is not None and self.trials < 1:
            raise InadmissibleError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise InadmissibleError(f"seed must be >= 0, got {self.seed}")
        if not 0 < self.eps < 1:
            raise InadmissibleError(f"eps must lie in (0, 1), got {self.eps}")
        if self.threads < 1:
            raise InadmissibleError(f"threads must be >= 1, got {self.threads}")

    def header(self) -> dict:
        """Поля в начале каждого машиночитаемого отчёта."""
        head = {"schema_version": SCHEMA_VERSION, "command": self.command, "seed": self.seed}
        if self.r1 is not None:
            head["signature"] = [self.r1, self.r2 or 0]
        return head


@dataclass
class StoredForm:
    """
    Найденная форма в том виде, в каком она лежит в хранилище.

    Attributes:
        id: Идентификатор записи (None для ещё не сохранённых)
        record: Приведённая форма с дискриминантом и флагами
        height_bound: X запуска, который её нашёл
        seed: Seed этого запуска
        created_at: Время добавления
    """
    id: Optional[int]
    record: FormClassRecord
    height_bound: int
    seed: int
    created_at: datetime

    def __post_init__(self) -> None:
        if self.height_bound < 1:
            raise InadmissibleError("height bound must be >= 1")

    @property
    def form(self) -> CubicForm:
        return self.record.reduced_form

    def __str__(self) -> str:
        return f"{self.form} disc={self.record.disc} (X={self.height_bound}, seed={self.seed})"
