"""
Dynamics of monomial and pseudomonomial germs at a satellite point:
pushforward of monomial valuations, eigenvaluations and dynamical
degrees, the Mobius action on skewness coordinates and the local normal
form classification.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Tuple

import mpmath
import pandas as pd

from .config import Config, DEFAULT_CONFIG
from .errors import (DegenerateMatrixError, GapViolatedError, InconsistentEigenDataError,
                     InfinityDynamicsError, NormalizationError, ParseError)
from .exactnum import (INF, IntMat2, MobiusAnalysis, MobiusMap, QuadNumber,
                       mobius_apply, mobius_classify, spectral_radius)
from .utils import setup_logger


logger = setup_logger(__name__)


@dataclass(frozen=True)
class ChartMonomial:
    """Monomial valuation v_{s,t} in a chart (x, y) at the crossing E/F."""
    s: QuadNumber
    t: QuadNumber
    chart: Tuple[str, str] = ("E", "F")

    def __post_init__(self):
        s, t = QuadNumber.coerce(self.s), QuadNumber.coerce(self.t)
        if s < 0 or t < 0 or (s == 0 and t == 0):
            raise NormalizationError(f"Monomial weights must be nonnegative, not both zero: {s}, {t}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    def scaled(self, factor) -> "ChartMonomial":
        return ChartMonomial(self.s * factor, self.t * factor, self.chart)

    def skewness_coordinate(self):
        """alpha_E(v / v(x)) = t/s (inf when s = 0)."""
        if self.s == 0:
            return INF
        q = self.t / self.s
        return q.p if q.is_rational else q

    def is_irrational(self) -> bool:
        return self.s != 0 and self.t != 0 and not (self.s / self.t).is_rational

    def normalized(self, mode: str = "t", weights: Tuple[int, int] = (1, 1)) -> "ChartMonomial":
        """
        Rescale: "t" makes t = 1 (s = 1 if t = 0), "min" makes the smallest
        positive weight 1, "weighted" makes s*b + t*b' = 1.
        """
        if mode == "t":
            divisor = self.t if self.t != 0 else self.s
        elif mode == "min":
            positive = [w for w in (self.s, self.t) if w > 0]
            divisor = min(positive)
        elif mode == "weighted":
            divisor = self.s * weights[0] + self.t * weights[1]
        else:
            raise NormalizationError(f"Unknown normalization {mode!r}")
        return self.scaled(QuadNumber(1) / divisor)

    def __str__(self):
        return f"v_{{{self.s},{self.t}}}"


@dataclass(frozen=True)
class MonomialEndo:
    """
    Germ f(x, y) = (x^a y^b phi, x^c y^d psi) at a satellite point,
    with exponent matrix [[a, b], [c, d]].
    """
    matrix: IntMat2
    source: Tuple[str, str] = ("E", "F")
    target: Tuple[str, str] = ("E", "F")
    pseudomonomial: bool = False
    tame: bool = True
    unit_tags: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.matrix.det == 0:
            raise DegenerateMatrixError(f"Monomial germ needs ad - bc != 0, got {self.matrix}")
        if not self.matrix.is_nonnegative():
            raise InfinityDynamicsError(f"Exponent matrix must be nonnegative, got {self.matrix}")

    @property
    def lambda2(self) -> int:
        return abs(self.matrix.det)

    def power(self, n: int) -> "MonomialEndo":
        return MonomialEndo(self.matrix ** n, self.source, self.target,
                            self.pseudomonomial, self.tame, self.unit_tags)

    def to_json(self) -> dict:
        return {"kind": "monomial", "matrix": self.matrix.rows(), "tame": self.tame,
                "pseudomonomial": self.pseudomonomial}

    @classmethod
    def from_json(cls, payload: Mapping) -> "MonomialEndo":
        try:
            if payload.get("kind", "monomial") != "monomial":
                raise ParseError(f"Not a monomial endomorphism: {payload!r}")
            return cls(IntMat2.from_rows(payload["matrix"]), tame=bool(payload.get("tame", True)),
                       pseudomonomial=bool(payload.get("pseudomonomial", False)))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid endomorphism payload: {payload!r}") from e


@dataclass(frozen=True)
class EigenData:
    """Dynamical degrees and eigenvaluation of a germ."""
    lambda1: QuadNumber
    lambda2: int
    eigenvaluation: Optional[ChartMonomial]
    gap: bool
    valuation_type: str
    matrix: Optional[IntMat2] = None

    def to_json(self) -> dict:
        payload = {"lambda1": self.lambda1.to_json(), "lambda1_text": str(self.lambda1),
                   "lambda2": self.lambda2, "gap": self.gap, "type": self.valuation_type}
        if self.eigenvaluation is not None:
            payload["eigenvaluation"] = {"s": self.eigenvaluation.s.to_json(),
                                         "t": self.eigenvaluation.t.to_json()}
        return payload


def pushforward(endo: MonomialEndo, v: ChartMonomial) -> ChartMonomial:
    """f_* v_{s,t} = v_{as + bt, cs + dt} at the target chart."""
    if v.chart != endo.source:
        raise InfinityDynamicsError(f"Valuation lives at {v.chart}, germ is defined at {endo.source}")
    s, t = endo.matrix.apply(v.s, v.t)
    return ChartMonomial(s, t, endo.target)


def iterate_pushforward(endo: MonomialEndo, v: ChartMonomial, n: int) -> List[ChartMonomial]:
    """Orbit v, f_* v, ..., f^n_* v of a self-map germ."""
    if endo.source != endo.target:
        raise InfinityDynamicsError("Iteration needs a germ from a chart to itself")
    orbit = [v]
    for _ in range(n):
        orbit.append(pushforward(endo, orbit[-1]))
    return orbit


def _perron_vector(A: IntMat2, lam: QuadNumber) -> Tuple[QuadNumber, QuadNumber]:
    if A.b != 0:
        return QuadNumber(A.b), lam - A.a
    if A.c != 0:
        return lam - A.d, QuadNumber(A.c)
    if A.a > A.d:
        return QuadNumber(1), QuadNumber(0)
    if A.d > A.a:
        return QuadNumber(0), QuadNumber(1)
    return QuadNumber(1), QuadNumber(1)


def eigenvaluation(endo: MonomialEndo, config: Optional[Config] = None,
                   weights: Tuple[int, int] = (1, 1)) -> EigenData:
    """
    Spectral radius of the exponent matrix and the Perron eigenvector as a
    normalized monomial valuation.

    Args:
        endo: Monomial germ
        config: Configuration (eigen_normalization)
        weights: Generic multiplicities (b, b') for the weighted normalization

    Returns:
        EigenData with the exact eigen equation verified
    """
    config = config or DEFAULT_CONFIG
    A = endo.matrix
    lam = spectral_radius(A)
    s, t = _perron_vector(A, lam)
    v = ChartMonomial(s, t, endo.source).normalized(config.eigen_normalization, weights)

    if endo.source == endo.target:
        image = pushforward(endo, v)
        if image != v.scaled(lam):
            raise InconsistentEigenDataError(f"f_* v = {image} differs from {lam} * {v}")

    lambda2 = endo.lambda2
    gap = lam * lam > lambda2
    kind = "irrational" if v.is_irrational() else "divisorial"
    if not gap:
        logger.warning(f"lambda1^2 = {lam * lam} does not exceed lambda2 = {lambda2}: no spectral gap")
    logger.info(f"eigenvaluation of {A}: lambda1={lam}, lambda2={lambda2}, v={v} ({kind})")
    return EigenData(lambda1=lam, lambda2=lambda2, eigenvaluation=v, gap=gap,
                     valuation_type=kind, matrix=A)


@dataclass(frozen=True)
class SkewnessMobius:
    """Mobius action on the skewness segment and its fixed-point data."""
    mobius: MobiusMap
    analysis: MobiusAnalysis
    bound_squared: QuadNumber

    @property
    def attracting(self):
        return self.analysis.attracting

    @property
    def multiplier(self) -> QuadNumber:
        return self.analysis.multiplier


def skewness_mobius(endo: MonomialEndo, pi_matrix: Optional[IntMat2] = None,
                    config: Optional[Config] = None) -> SkewnessMobius:
    """
    M = M_f o M_pi^-1 with M_f(t) = (c + d t)/(a + b t): loxodromic, its
    attracting fixed point is the skewness of the eigenvaluation and its
    multiplier is at most sqrt(lambda2 / lambda1^2).
    """
    eigen = eigenvaluation(endo, config)
    if not eigen.gap:
        raise GapViolatedError(f"lambda1^2 = {eigen.lambda1 ** 2} <= lambda2 = {eigen.lambda2}")
    A = endo.matrix
    pi_matrix = pi_matrix or IntMat2.identity()
    m_f = MobiusMap(IntMat2(A.d, A.c, A.b, A.a))
    m_pi = MobiusMap(pi_matrix)
    mobius = m_f @ m_pi.inverse()
    analysis = mobius_classify(mobius)
    if analysis.kind != "loxodromic":
        raise InconsistentEigenDataError(f"Skewness map {mobius} is {analysis.kind}, not loxodromic")

    expected = mobius_apply(m_pi, eigen.eigenvaluation.skewness_coordinate())
    if analysis.attracting != expected:
        raise InconsistentEigenDataError(
            f"Attracting fixed point {analysis.attracting} is not the eigenvaluation skewness {expected}")

    bound_squared = QuadNumber(eigen.lambda2) / (eigen.lambda1 * eigen.lambda1)
    if analysis.multiplier * analysis.multiplier > bound_squared:
        raise InconsistentEigenDataError(
            f"Multiplier {analysis.multiplier} exceeds sqrt(lambda2/lambda1^2)")
    logger.debug(f"skewness Mobius {mobius}: t*={analysis.attracting}, multiplier={analysis.multiplier}")
    return SkewnessMobius(mobius=mobius, analysis=analysis, bound_squared=bound_squared)


def divisorial_mobius(lambda1: int, lambda2: int, d: int, b: int, n0: int) -> MobiusAnalysis:
    """
    Skewness map [[d, 0], [b - n0, lambda1]] of the divisorial case: fixed
    point 0 with multiplier d/lambda1 <= lambda2/lambda1^2 < 1.
    """
    if lambda1 * lambda1 <= lambda2:
        raise GapViolatedError(f"lambda1^2 = {lambda1 ** 2} <= lambda2 = {lambda2}")
    analysis = mobius_classify(MobiusMap(IntMat2(d, 0, b - n0, lambda1)))
    if analysis.kind != "loxodromic" or analysis.attracting != 0:
        raise InconsistentEigenDataError(f"Divisorial skewness map is not contracting at 0: {analysis}")
    if Fraction(d, lambda1) > Fraction(lambda2, lambda1 * lambda1):
        raise InconsistentEigenDataError(f"d/lambda1 = {Fraction(d, lambda1)} exceeds lambda2/lambda1^2")
    return analysis


def classify_normal_form(eigen: EigenData, boundary_kind: str = "rational",
                         tame: bool = True) -> str:
    """
    Local normal form: monomial, pseudomonomial, divisorial-type,
    infinitely-singular-type or elliptic.
    """
    if boundary_kind == "elliptic":
        return "elliptic"
    if eigen.valuation_type == "infinitely-singular":
        if not (eigen.lambda1.is_rational and eigen.lambda1.p.denominator == 1 and eigen.lambda1 >= 2):
            raise InconsistentEigenDataError(
                f"Infinitely singular eigenvaluation needs an integer lambda1 >= 2, got {eigen.lambda1}")
        return "infinitely-singular-type"
    if eigen.valuation_type == "irrational":
        return "monomial" if tame else "pseudomonomial"
    if eigen.valuation_type == "divisorial":
        if eigen.lambda1 > eigen.lambda2:
            logger.error(f"divisorial eigenvaluation with lambda1={eigen.lambda1} > lambda2={eigen.lambda2}")
            raise InconsistentEigenDataError(
                f"Divisorial eigenvaluation requires lambda1 <= lambda2, got {eigen.lambda1} > {eigen.lambda2}")
        return "divisorial-type"
    raise InfinityDynamicsError(f"Unknown valuation type {eigen.valuation_type!r}")


def slope_convergence(endo: MonomialEndo, v: ChartMonomial, steps: int,
                      config: Optional[Config] = None) -> pd.DataFrame:
    """
    Distance of the skewness coordinate of f^k_* v to that of the
    eigenvaluation, at the configured decimal precision.
    """
    config = config or DEFAULT_CONFIG
    eigen = eigenvaluation(endo, config)
    target = eigen.eigenvaluation.skewness_coordinate()
    rows = []
    with mpmath.workdps(config.decimal_digits):
        goal = QuadNumber.coerce(target).to_mpf(config.decimal_digits)
        previous = None
        for k, w in enumerate(iterate_pushforward(endo, v, steps)):
            coord = w.skewness_coordinate()
            if coord is INF:
                continue
            error = abs(QuadNumber.coerce(coord).to_mpf(config.decimal_digits) - goal)
            ratio = error / previous if previous not in (None, 0) else None
            rows.append({"step": k, "error": error, "ratio": ratio})
            previous = error
    return pd.DataFrame(rows)
