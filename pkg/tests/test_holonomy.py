from fractions import Fraction

from morsecube import holonomy
from morsecube.holonomy import Matrix, QSqrt2, half


def test_field_arithmetic():
    r2 = QSqrt2(0, 1)
    assert r2 * r2 == 2
    x = QSqrt2(3, -2)
    assert x * x.inverse() == 1
    assert half(1, 1) * half(1, 1) == QSqrt2(Fraction(3, 4), Fraction(1, 2))
    assert abs(float(half(1, 1)) - (1 + 2 ** 0.5) / 2) < 1e-12


def test_generators():
    a, b = holonomy.generator_a(), holonomy.generator_b()
    assert a.order() == 12 and b.order() == 12
    assert a.determinant() == 1 and b.determinant() == 1
    assert a @ a.inverse() == Matrix.identity(5)
    assert b.power(-3) @ b.power(3) == Matrix.identity(5)


def test_relator_and_reverse():
    gens = {"a": holonomy.generator_a(), "b": holonomy.generator_b()}
    one = Matrix.identity(5)
    assert holonomy.evaluate_word(holonomy.RELATOR, gens) == one
    assert holonomy.evaluate_word(" ".join(reversed(holonomy.RELATOR.split())), gens) == one
    assert holonomy.evaluate_word("a b", gens) != one


def test_lorentz_form_is_the_only_one_found():
    mats = [holonomy.generator_a(), holonomy.generator_b()]
    assert holonomy.find_diagonal_form(mats) == [holonomy.LORENTZ_FORM]


def test_report():
    report = holonomy.verify_holonomy()
    assert report.passed and report.form == holonomy.LORENTZ_FORM
    assert [name for name, _, _ in report.checks()] == ["orders", "relator", "form"]
