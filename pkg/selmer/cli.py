"""
CLI interface для selmer.

Предоставляет команды:
- tables: предсказанные распределения и моменты для сигнатур
- mass-check: размеры орбит против перебора и формулы порядков изометрий
- class-list: метки классов, представители и порядки стабилизаторов
- witt-selftest: случайные примеры продолжения Витта
- simulate: Монте-Карло модели в сравнении с замкнутыми формулами
- cubic-sample: случайные бинарные кубические формы, по желанию в хранилище
- cubic-scan: все приведённые максимальные неприводимые формы до дискриминанта
- identity-check: точные тождества, на которых стоят формулы

Коды выхода: 0 успех, 2 неверные аргументы, 3 проверка не прошла, 4 лимит ресурсов.
"""

import csv
import io
import json
import logging
import os
from fractions import Fraction
from functools import wraps
from math import lcm
from pathlib import Path
from typing import Optional, Sequence

import click
import numpy as np

from .cubicforms import CSV_HEADER, sample_forms, scan
from .db import FormStore
from .errors import CheckFailedError, ResourceLimitError
from .heuristics import (
    MOMENT_COLUMNS,
    RHO_PLUS_COLUMNS,
    STANDARD_SIGNATURES,
    TABLES,
    IdentityResult,
    Signature,
    TableRow,
    TruncatedReal,
    build_table,
    moment_identities,
    normalization_identities,
    subspace_count_identities,
    wz_identities,
)
from .isotropic import (
    brute_stabilizer_order,
    class_labels,
    mass_check as run_mass_check,
    odd_mass_identity,
    orbit_stats,
    representative,
    same_parity_pairs,
)
from .models import CommandConfig, OutputFormat
from .montecarlo import SimReport, run_conditional, run_simulation
from .parser import parse_signatures, parse_space
from .symspace import SpaceType, witt_selftest

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3
EXIT_RESOURCE_LIMIT = 4

# Путь к хранилищу форм по умолчанию (если не заданы --db или SELMER_DB)
DEFAULT_DB_PATH = "~/.selmer/forms.db"

# Перебор стабилизаторов идёт по Aut(W) × Aut(W')
MAX_BRUTE_STABILIZER_DIM = 4


def get_db(path: Optional[str] = None) -> FormStore:
    """
    Получение экземпляра хранилища форм.
    Создает файл и схему, если их нет.
    """
    db_path = Path(os.path.expanduser(path or os.environ.get("SELMER_DB", DEFAULT_DB_PATH)))
    db = FormStore(str(db_path))
    db.init_db()
    return db


def _fail(message: str, code: int) -> None:
    click.echo(click.style(f"Error: {message}", fg="red"))
    raise SystemExit(code)


def handle_errors(func):
    """Перевод доменных ошибок в коды выхода."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ResourceLimitError as e:
            _fail(str(e), EXIT_RESOURCE_LIMIT)
        except CheckFailedError as e:
            _fail(str(e), EXIT_CHECK_FAILED)
        except ValueError as e:
            _fail(str(e), EXIT_USAGE)
    return wrapper


def output_options(func):
    func = click.option(
        "--output", "-o", "output_path", type=click.Path(dir_okay=False), default=None,
        help="Записать в файл вместо stdout",
    )(func)
    func = click.option(
        "--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
        default=OutputFormat.TEXT.value, show_default=True, help="Формат вывода",
    )(func)
    return func


def _space_option(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_space(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _space_name(space_type: SpaceType, n: int) -> str:
    return f"{space_type.value}:{n}"


def emit(
    config: CommandConfig,
    text: Sequence[str],
    header: Sequence[str],
    rows: Sequence[Sequence],
    payload: dict,
) -> None:
    """Вывод отчёта в выбранном формате."""
    if config.output_format is OutputFormat.JSON:
        body = json.dumps({**config.header(), **payload}, sort_keys=True, indent=2) + "\n"
    elif config.output_format is OutputFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        body = buf.getvalue()
    else:
        body = "".join(line + "\n" for line in text)

    if config.output_path:
        with click.open_file(config.output_path, "w") as fh:
            fh.write(body)
        logger.info("wrote %s report to %s", config.output_format.value, config.output_path)
    else:
        click.echo(body, nl=False)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Логировать на уровне DEBUG")
def cli(verbose: bool):
    """
    Selmer CLI - эвристики сигнатур 2-Сельмера, изотропные подпространства и кубические поля.

    Примеры использования:

        selmer tables --which k --r1 5 --r2 0

        selmer mass-check --left nonalt:3 --right nonalt:3

        selmer class-list --left even:4 --right alt:4

        selmer simulate --r1 3 --r2 0 --trials 100000 --seed 42

        selmer cubic-scan --D 250 --format csv
    """
    level = "DEBUG" if verbose else os.environ.get("SELMER_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise click.UsageError(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT)


# === tables ===


def _columns(which: str, row: TableRow) -> list[str]:
    if which == "k":
        return [f"k={i}" for i in range(len(row.cells))]
    if which == "rho-plus":
        return ([f"rho+={i}" for i in range(RHO_PLUS_COLUMNS)]
                + [f"t={t}" for t in range(1, MOMENT_COLUMNS + 1)])
    if which == "sigrank":
        return [f"s={s}" for s in range(1, len(row.cells) + 1)]
    return ["split"]


def _render_cells(which: str, row: TableRow) -> list[str]:
    """Точные ячейки - дробями (для k с общим знаменателем), остальные - с гарантированной погрешностью."""
    if which == "k":
        den = lcm(*(c.denominator for c in row.cells))
        return [f"{c.numerator * (den // c.denominator)}/{den}" for c in row.cells]
    return [str(c) if isinstance(c, Fraction) else c.format_cell(6) for c in row.cells]


def _cell_error(cell) -> str:
    return f"{float(cell.err):.1e}" if isinstance(cell, TruncatedReal) else ""


def _signatures(r1: Optional[int], r2: Optional[int], signature_list: Optional[str]) -> Optional[list[Signature]]:
    if signature_list and r1 is not None:
        raise click.UsageError("use either --r1/--r2 or --signatures")
    if signature_list:
        return parse_signatures(signature_list)
    if r1 is None:
        if r2 is not None:
            raise click.UsageError("--r2 needs --r1")
        return None
    return [Signature(r1, r2 or 0)]


@cli.command()
@click.option("--which", type=click.Choice(TABLES), default="k", show_default=True, help="Какую таблицу вывести")
@click.option("--r1", type=int, default=None, help="Вещественные места (нечётное число)")
@click.option("--r2", type=int, default=None, help="Комплексные места")
@click.option("--signatures", "signature_list", default=None, help='Несколько сигнатур, например "3,0;5,1"')
@click.option("--eps", type=float, default=1e-9, show_default=True, help="Целевая погрешность для бесконечных рядов")
@click.option("--threads", type=int, default=1, show_default=True)
@output_options
@handle_errors
def tables(which, r1, r2, signature_list, eps, threads, output_format, output_path):
    """
    Вывести таблицу предсказанных распределений.

    Без --r1 и --signatures используются девять стандартных сигнатур.

    Примеры:

        selmer tables --which k --r1 5 --r2 0

        selmer tables --which sigrank --signatures "5,0;7,0"
    """
    config = CommandConfig("tables", r1=r1, r2=r2, eps=eps, threads=threads,
                           output_format=output_format, output_path=output_path)
    sigs = _signatures(r1, r2, signature_list)
    table = build_table(which, sigs, Fraction(str(eps)), threads)

    text = [f"table {which}"]
    csv_rows = []
    json_rows = []
    for row in table:
        cells = _render_cells(which, row)
        columns = _columns(which, row)
        text.append(f"{str(row.sig):<6} " + " ".join(cells))
        for column, cell, raw in zip(columns, cells, row.cells):
            csv_rows.append((row.sig.r1, row.sig.r2, column, cell, _cell_error(raw)))
        json_rows.append({
            "signature": [row.sig.r1, row.sig.r2],
            "cells": {
                column: {"value": cell, "error": _cell_error(raw)}
                for column, cell, raw in zip(columns, cells, row.cells)
            },
        })
    emit(config, text, ("r1", "r2", "column", "value", "error"), csv_rows,
         {"which": which, "eps": str(Fraction(str(eps))), "rows": json_rows})


# === isotropic subspaces ===


@cli.command("mass-check")
@click.option("--left", callback=_space_option, default=None, help='W, например "nonalt:3"')
@click.option("--right", callback=_space_option, default=None, help="W', например \"alt:4\"")
@click.option("--all-pairs", "max_total", type=int, default=None,
              help="Проверить все пары одной чётности с n + n' <= N")
@click.option("--q", type=int, default=2, show_default=True, help="Размер поля для формул порядков")
@click.option("--no-brute", is_flag=True, help="Пропустить полный перебор")
@click.option("--threads", type=int, default=1, show_default=True)
@output_options
@handle_errors
def mass_check(left, right, max_total, q, no_brute, threads, output_format, output_path):
    """
    Проверить, что размеры орбит в сумме дают число максимальных изотропных подпространств.

    Пример:

        selmer mass-check --left nonalt:3 --right nonalt:3
    """
    config = CommandConfig("mass-check", q=q, threads=threads,
                           output_format=output_format, output_path=output_path)
    if max_total is not None:
        if left or right:
            raise click.UsageError("use either --left/--right or --all-pairs")
        pairs = same_parity_pairs(max_total)
    elif left and right:
        pairs = [(*left, *right)]
    else:
        raise click.UsageError("--left and --right are required")

    text, rows, reports = [], [], []
    for w_type, n, wp_type, np_ in pairs:
        report = run_mass_check(w_type, n, wp_type, np_, q, brute=not no_brute, threads=threads)
        name_w, name_wp = _space_name(w_type, n), _space_name(wp_type, np_)
        text.append(f"{name_w} + {name_wp}: {report.summary()}")
        orbits = "+".join(str(s.orbit) for s in report.stats)
        rows.append((name_w, name_wp, q, orbits, report.orbit_sum,
                     "" if report.brute is None else report.brute, report.formula, int(report.ok)))
        reports.append({
            "left": name_w, "right": name_wp, "q": q,
            "orbits": [s.orbit for s in report.stats],
            "orbit_sum": report.orbit_sum, "brute": report.brute,
            "formula": report.formula, "ok": report.ok,
        })
    emit(config, text, ("left", "right", "q", "orbits", "orbit_sum", "brute", "formula", "ok"),
         rows, {"reports": reports})
    if not all(r["ok"] for r in reports):
        raise SystemExit(EXIT_CHECK_FAILED)


@cli.command("class-list")
@click.option("--left", callback=_space_option, required=True, help='W, например "even:4"')
@click.option("--right", callback=_space_option, required=True, help="W', например \"alt:4\"")
@click.option("--q", type=int, default=2, show_default=True, help="Размер поля для формул порядков")
@click.option("--brute", is_flag=True, help=f"Также посчитать стабилизаторы перебором (n, n' <= {MAX_BRUTE_STABILIZER_DIM})")
@output_options
@handle_errors
def class_list(left, right, q, brute, output_format, output_path):
    """
    Перечислить классы эквивалентности максимальных изотропных подпространств W + W'.

    Для каждого класса выводятся явный представитель (строки в виде W|W'),
    порядок стабилизатора и размер орбиты.

    Пример:

        selmer class-list --left nonalt:3 --right nonalt:3
    """
    config = CommandConfig("class-list", q=q, output_format=output_format, output_path=output_path)
    (w_type, n), (wp_type, np_) = left, right
    if brute and max(n, np_) > MAX_BRUTE_STABILIZER_DIM:
        raise ResourceLimitError(f"brute-force stabilizers limited to n, n' <= {MAX_BRUTE_STABILIZER_DIM}")

    text = [f"{_space_name(w_type, n)} + {_space_name(wp_type, np_)}, q={q}"]
    rows, classes = [], []
    mismatches = 0
    for label in class_labels(w_type, n, wp_type, np_):
        stats = orbit_stats(label, q)
        rep = representative(label)
        counted = brute_stabilizer_order(rep.space, rep.S) if brute else None
        if counted is not None and counted != stats.stab:
            mismatches += 1
        line = f"{label}: stabilizer {stats.stab}, orbit {stats.orbit}"
        if stats.closed_form is not None:
            line += f", closed form {stats.closed_form}"
        if counted is not None:
            line += f", brute {counted}"
        text.append(line)
        text.extend(f"    {r}" for r in rep.format_rows())
        rows.append((label.k, label.kp, int(label.wcan_in_U), int(label.wcan_in_Up), stats.stab,
                     stats.orbit, "" if stats.closed_form is None else stats.closed_form,
                     "" if counted is None else counted, " ".join(rep.format_rows())))
        classes.append({
            "label": str(label), "k": label.k, "kp": label.kp,
            "wcan_in_U": label.wcan_in_U, "wcan_in_Up": label.wcan_in_Up,
            "stabilizer": stats.stab, "orbit": stats.orbit,
            "closed_form": stats.closed_form, "brute": counted,
            "representative": rep.format_rows(),
        })
    text.append(f"total {stats.total}" if classes else "no classes")
    emit(config, text,
         ("k", "kp", "wcan_in_U", "wcan_in_Up", "stabilizer", "orbit", "closed_form", "brute", "rows"),
         rows, {"left": _space_name(w_type, n), "right": _space_name(wp_type, np_), "q": q, "classes": classes})
    if mismatches:
        raise SystemExit(EXIT_CHECK_FAILED)


@cli.command("witt-selftest")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-dim", type=int, default=8, show_default=True)
@output_options
@handle_errors
def witt_selftest_command(trials, seed, max_dim, output_format, output_path):
    """
    Продолжить случайные частичные изометрии и проверить каждый исход.

    Пример:

        selmer witt-selftest --trials 10000 --seed 1
    """
    config = CommandConfig("witt-selftest", trials=trials, seed=seed,
                           output_format=output_format, output_path=output_path)
    report = witt_selftest(trials, np.random.default_rng(seed), max_dim)
    verdict = "OK" if report.ok else "FAIL"
    text = [
        f"seed: {seed}",
        f"witt self-test: {report.extended} extended, {report.rejected} rejected, "
        f"{len(report.failures)} failures : {verdict}",
    ]
    text += [f"  {t}: {c}" for t, c in sorted(report.by_type.items())]
    text += [f"  {f}" for f in report.failures]
    emit(config, text, ("trials", "extended", "rejected", "failures", "seed"),
         [(trials, report.extended, report.rejected, len(report.failures), seed)],
         {"trials": trials, "extended": report.extended, "rejected": report.rejected,
          "failures": report.failures, "by_type": dict(sorted(report.by_type.items()))})
    if not report.ok:
        raise SystemExit(EXIT_CHECK_FAILED)


# === simulation ===


def _outcome(value) -> str:
    return str(value).lower() if isinstance(value, bool) else str(value)


@cli.command()
@click.option("--r1", type=int, required=True, help="Вещественные места (нечётное число)")
@click.option("--r2", type=int, default=0, show_default=True, help="Комплексные места")
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--sigma", type=float, default=4.0, show_default=True, help="Допустимый |z| на ячейку")
@click.option("--k", type=int, default=None, help="Условие dim(im ∩ V_inf) = k (нужен --rho)")
@click.option("--rho", type=int, default=None, help="Условие на 2-ранг группы классов rho (нужен --k)")
@output_options
@handle_errors
def simulate(r1, r2, trials, seed, threads, sigma, k, rho, output_format, output_path):
    """
    Смоделировать случайные поля и сравнить с замкнутыми формулами.

    Отчёт зависит только от seed, но не от --threads.

    Примеры:

        selmer simulate --r1 3 --r2 0 --trials 1000000 --seed 42 --threads 4

        selmer simulate --r1 5 --k 1 --rho 2 --trials 100000
    """
    config = CommandConfig("simulate", r1=r1, r2=r2, trials=trials, seed=seed, threads=threads,
                           output_format=output_format, output_path=output_path)
    sig = Signature(r1, r2)
    if (k is None) != (rho is None):
        raise click.UsageError("--k and --rho go together")
    if k is None:
        report = run_simulation(sig, trials, seed, threads, sigma)
    else:
        report = run_conditional(sig, k, rho, trials, seed, threads, sigma)
    _emit_simulation(config, report)
    if not report.passed:
        raise SystemExit(EXIT_CHECK_FAILED)


def _emit_simulation(config: CommandConfig, report: SimReport) -> None:
    title = f"simulate {report.sig}: {report.trials} trials"
    if report.conditioned_on:
        title += " given k={}, rho={}".format(*report.conditioned_on)
    text = [f"seed: {report.seed}", title]
    rows, comparisons = [], []
    for comp in report.comparisons:
        pvalue = "n/a" if comp.chi2_pvalue is None else f"{comp.chi2_pvalue:.4f}"
        verdict = "OK" if comp.passed else "FAIL"
        text.append(f"{comp.name}: max |z| {comp.max_abs_z:.2f}, chi2 p {pvalue} : {verdict}")
        cells = []
        for cell in comp.cells:
            freq = cell.observed / comp.trials
            if cell.observed or cell.expected * comp.trials >= 0.5:
                text.append(f"  {_outcome(cell.outcome):>5}  observed {freq:.6f}  "
                            f"expected {cell.expected:.6f}  z {cell.z:+.2f}")
            rows.append((comp.name, _outcome(cell.outcome), cell.observed,
                         f"{freq:.6f}", f"{cell.expected:.6g}", f"{cell.z:.3f}", report.seed))
            cells.append({"outcome": _outcome(cell.outcome), "observed": cell.observed,
                          "expected": cell.expected, "z": cell.z})
        comparisons.append({"name": comp.name, "max_abs_z": comp.max_abs_z,
                            "chi2_pvalue": comp.chi2_pvalue, "passed": comp.passed, "cells": cells})
    text.append(f"max deviation {report.max_deviation:.6f} : {'OK' if report.passed else 'FAIL'}")
    emit(config, text, ("quantity", "outcome", "observed", "frequency", "expected", "z", "seed"), rows,
         {"trials": report.trials, "conditioned_on": report.conditioned_on,
          "passed": report.passed, "comparisons": comparisons})


# === cubic forms ===


@cli.command("cubic-sample")
@click.option("--X", "X", type=int, default=100, show_default=True, help="Граница высоты")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--db", "db_path", default=None, help="Сохранить принятые формы в этот файл SQLite")
@click.option("--store", is_flag=True, help="Сохранить принятые формы в хранилище по умолчанию")
@output_options
@handle_errors
def cubic_sample(X, trials, seed, db_path, store, output_format, output_path):
    """
    Сгенерировать случайные формы и оставить приведённые, неприводимые, максимальные.

    a, b равномерны в [0, X], c, d - в [-X, X]. Каждая принятая форма -
    приведённый представитель одного вполне вещественного кубического поля.

    Пример:

        selmer cubic-sample --X 50 --trials 10000 --seed 7 --db forms.db
    """
    config = CommandConfig("cubic-sample", X=X, trials=trials, seed=seed,
                           output_format=output_format, output_path=output_path)
    records = sample_forms(X, trials, np.random.default_rng(seed))
    records.sort(key=lambda r: (r.disc, r.reduced_form.coefficients))

    text = [f"seed: {seed}", f"sampled {trials} forms at height {X}: {len(records)} accepted"]
    text += [f"{r.disc:>10}  {r.reduced_form}" for r in records]
    new = None
    if db_path or store:
        db = get_db(db_path)
        new = db.add_records(records, X, seed)
        text.append(f"stored {new} new forms ({db.count()} in {db.db_path})")
    emit(config, text, CSV_HEADER + ("seed",), [r.as_row() + (seed,) for r in records],
         {"X": X, "trials": trials, "accepted": len(records), "new": new,
          "forms": [dict(zip(CSV_HEADER, r.as_row())) for r in records]})


@cli.command("cubic-scan")
@click.option("--D", "D", type=int, required=True, help="Граница дискриминанта")
@output_options
@handle_errors
def cubic_scan(D, output_format, output_path):
    """
    Перечислить все вполне вещественные кубические поля с дискриминантом до D.

    Каждое поле задаётся приведённой формой; колонки CSV:
    a, b, c, d, disc, maximal, irreducible.

    Пример:

        selmer cubic-scan --D 250 --format csv
    """
    config = CommandConfig("cubic-scan", D=D, output_format=output_format, output_path=output_path)
    records = scan(D)
    text = [f"{len(records)} fields with 0 < disc <= {D}"]
    text += [f"{r.disc:>10}  {r.reduced_form}" for r in records]
    emit(config, text, CSV_HEADER, [r.as_row() for r in records],
         {"D": D, "forms": [dict(zip(CSV_HEADER, r.as_row())) for r in records]})


# === identities ===


@cli.command("identity-check")
@click.option("--q", "qs", type=int, multiple=True, default=(2, 4), show_default=True,
              help="Размеры полей для WZ и массовых тождеств (можно повторять)")
@click.option("--max-m", type=int, default=8, show_default=True)
@click.option("--max-r2", type=int, default=4, show_default=True)
@click.option("--subspace-m", type=int, default=5, show_default=True,
              help="Наибольшая размерность для полного подсчёта подпространств")
@click.option("--signatures", "signature_list", default=None, help='Сигнатуры для моментов и нормировок')
@click.option("--all", "show_all", is_flag=True, help="Выводить и выполненные тождества")
@output_options
@handle_errors
def identity_check(qs, max_m, max_r2, subspace_m, signature_list, show_all, output_format, output_path):
    """
    Проверить точные тождества, на которых стоят замкнутые формулы.

    Запускает сумму с WZ-сертификатом, счёт случайных подпространств против
    полного перебора, тождества моментов и нормировок и массовое тождество
    для нечётномерных сторон.

    Пример:

        selmer identity-check --q 2 --max-m 4
    """
    config = CommandConfig("identity-check", output_format=output_format, output_path=output_path)
    sigs = parse_signatures(signature_list) if signature_list else STANDARD_SIGNATURES
    groups = {
        "wz": wz_identities(qs, max_m, max_r2),
        "subspaces": subspace_count_identities(subspace_m),
        "moments": moment_identities(sigs),
        "normalizations": normalization_identities(sigs),
    }
    odd_mass = []
    for q in qs:
        for n in range(1, 8, 2):
            for np_ in range(n, 8, 2):
                lhs, rhs = odd_mass_identity(n, np_, q)
                odd_mass.append(IdentityResult(f"odd mass q={q} n={n} n'={np_}", lhs == rhs, str(lhs)))
    groups["odd-mass"] = odd_mass

    text, rows, payload = [], [], {}
    failed = 0
    for group, results in groups.items():
        items = [(r.name, r.ok, r.detail) for r in results]
        passed = sum(ok for _, ok, _ in items)
        failed += len(items) - passed
        text.append(f"{group}: {passed}/{len(items)} {'OK' if passed == len(items) else 'FAIL'}")
        for name, ok, detail in items:
            if show_all or not ok:
                text.append(f"  {name}: {'OK' if ok else 'FAIL'} {detail}".rstrip())
            rows.append((group, name, int(ok), detail))
        payload[group] = [{"name": name, "ok": ok, "detail": detail} for name, ok, detail in items]
    emit(config, text, ("group", "name", "ok", "detail"), rows, {"groups": payload, "failed": failed})
    if failed:
        raise SystemExit(EXIT_CHECK_FAILED)


def main():
    """Точка входа selmer CLI."""
    cli()


if __name__ == "__main__":
    main()
