"""
Database layer для найденных кубических форм.

Предоставляет класс FormStore для работы с SQLite хранилищем приведённых форм,
найденных cubic-sample. Ключ - приведённая форма, поэтому каждое кубическое
поле хранится один раз.
"""

import logging
import sqlite3
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, List

from .cubicforms import CubicForm, FormClassRecord
from .models import StoredForm

logger = logging.getLogger(__name__)


class FormStore:
    """
    Класс для работы с SQLite хранилищем приведённых бинарных кубических форм.

    Attributes:
        db_path: Путь к файлу базы данных SQLite

    Example:
        >>> store = FormStore("forms.db")
        >>> store.init_db()
        >>> store.add_record(record, X=100, seed=42)
        True
        >>> store.count()
        1
    """

    def __init__(self, db_path: str) -> None:
        """
        Инициализация хранилища.

        Args:
            db_path: Путь к файлу SQLite базы данных.
                    Если файл или директория не существуют, они будут созданы.
        """
        self.db_path = Path(db_path)
        # Создаем директорию, если не существует
        self.db_path.parent.mkdir(parents=True, exist_ok=True)

    @contextmanager
    def _get_connection(self) -> Iterator[sqlite3.Connection]:
        """
        Контекстный менеджер для подключения к базе данных.

        Делает commit при успехе и rollback при исключении.

        Yields:
            sqlite3.Connection: Открытое подключение со строками sqlite3.Row
        """
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        except Exception:
            conn.rollback()
            raise
        finally:
            conn.close()

    def init_db(self) -> None:
        """
        Создание таблицы forms и индексов, если они не существуют.
        """
        with self._get_connection() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS forms (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    a INTEGER NOT NULL,
                    b INTEGER NOT NULL,
                    c INTEGER NOT NULL,
                    d INTEGER NOT NULL,
                    disc INTEGER NOT NULL CHECK (disc != 0),
                    maximal INTEGER NOT NULL,
                    irreducible INTEGER NOT NULL,
                    height_bound INTEGER NOT NULL CHECK (height_bound >= 1),
                    seed INTEGER NOT NULL,
                    created_at TEXT NOT NULL,
                    UNIQUE (a, b, c, d)
                )
            """)

            # Индекс для поиска и выборки по дискриминанту
            conn.execute("""
                CREATE INDEX IF NOT EXISTS idx_forms_disc
                ON forms (disc)
            """)

    def add_record(self, record: FormClassRecord, X: int, seed: int) -> bool:
        """
        Сохранение найденной записи.

        Args:
            record: Приведённая форма с дискриминантом и флагами
            X: Граница высоты запуска
            seed: Seed запуска

        Returns:
            bool: True, если форма новая, False, если она уже была сохранена

        Example:
            >>> store.add_record(record, 100, 42)
            True
            >>> store.add_record(record, 200, 7)
            False
        """
        f = record.reduced_form
        with self._get_connection() as conn:
            cursor = conn.execute(
                """
                INSERT OR IGNORE INTO forms
                    (a, b, c, d, disc, maximal, irreducible, height_bound, seed, created_at)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    f.a, f.b, f.c, f.d,
                    record.disc,
                    int(record.maximal),
                    int(record.irreducible),
                    X,
                    seed,
                    datetime.now().isoformat(),
                )
            )
            added = cursor.rowcount > 0
        if not added:
            logger.debug("form %s already stored", f)
        return added

    def add_records(self, records: List[FormClassRecord], X: int, seed: int) -> int:
        """Сохранение нескольких записей; возвращает число новых."""
        return sum(self.add_record(r, X, seed) for r in records)

    def _row_to_stored(self, row: sqlite3.Row) -> StoredForm:
        """Преобразование строки БД в объект StoredForm."""
        record = FormClassRecord(
            reduced_form=CubicForm(row["a"], row["b"], row["c"], row["d"]),
            disc=row["disc"],
            maximal=bool(row["maximal"]),
            irreducible=bool(row["irreducible"]),
        )
        return StoredForm(
            id=row["id"],
            record=record,
            height_bound=row["height_bound"],
            seed=row["seed"],
            created_at=datetime.fromisoformat(row["created_at"]),
        )

    def count(self) -> int:
        with self._get_connection() as conn:
            return conn.execute("SELECT COUNT(*) FROM forms").fetchone()[0]

    def records(self) -> List[StoredForm]:
        """
        Получение всех сохранённых форм.

        Returns:
            List[StoredForm]: Отсортированы по дискриминанту, затем по коэффициентам
        """
        with self._get_connection() as conn:
            cursor = conn.execute(
                """
                SELECT id, a, b, c, d, disc, maximal, irreducible, height_bound, seed, created_at
                FROM forms
                ORDER BY disc ASC, a ASC, b ASC, c ASC, d ASC
                """
            )
            return [self._row_to_stored(row) for row in cursor.fetchall()]

    def discs(self) -> List[int]:
        """Различные сохранённые дискриминанты по возрастанию."""
        with self._get_connection() as conn:
            cursor = conn.execute("SELECT DISTINCT disc FROM forms ORDER BY disc ASC")
            return [row["disc"] for row in cursor.fetchall()]
