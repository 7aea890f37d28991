from fractions import Fraction
from typing import Dict, List, Optional, Tuple
import logging
import re
import sys


class FreeFieldError(ValueError):
    """Base class for every error raised by the algebra engine"""


class FlavorError(FreeFieldError):
    """A state left the flavor it was declared in (PLUS vs FULL)"""


class GradeError(FreeFieldError):
    """Bad weight/charge request or a term outside the expected weight space"""


class DimensionError(FreeFieldError):
    """Construction that needs a particular dimension N (even N, N = 2, ...)"""


class TextFormError(FreeFieldError):
    """Text form could not be parsed"""


class VectorFieldError(FreeFieldError):
    """Vector field of the wrong kind for the requested operation"""


class TextFormUtils:
    """Utility class for the canonical text forms of monomials and vector fields"""

    MODE_TOKEN_PATTERN = r'^(beta|gamma|b|c)\{(\d+),(-?\d+)\}$'
    GAMMA_POLY_PATTERN = r'^g\[(\d+(?:,\d+)*)\]$'
    FIELD_TERM_PATTERN = re.compile(
        r'([+-])?\s*(\d+(?:/\d+)?)?\s*((?:x\d+(?:\^\d+)?\s*)*)d(\d+)'
    )
    VARIABLE_PATTERN = re.compile(r'x(\d+)(?:\^(\d+))?')

    @staticmethod
    def parse_mode_token(token: str) -> Tuple[str, int, int]:
        """Parse "beta{1,-1}" into ("beta", 1, -1)"""
        match = re.match(TextFormUtils.MODE_TOKEN_PATTERN, token)
        if not match:
            raise TextFormError(f"Invalid mode token. Expected species{{direction,mode}}, got: {token}")
        return match.group(1), int(match.group(2)), int(match.group(3))

    @staticmethod
    def parse_gamma_poly(token: str) -> Tuple[int, ...]:
        """Parse "g[0,2]" into (0, 2)"""
        match = re.match(TextFormUtils.GAMMA_POLY_PATTERN, token)
        if not match:
            raise TextFormError(f"Invalid gamma polynomial token. Expected g[e1,...,eN], got: {token}")
        return tuple(int(part) for part in match.group(1).split(','))

    @staticmethod
    def split_monomial(text: str) -> Tuple[List[Tuple[str, int, int]], Optional[Tuple[int, ...]]]:
        """
        Split a monomial text form into its mode tokens and the optional
        gamma_poly exponents. "1" is the vacuum.
        """
        if text is None:
            raise TextFormError("Monomial text cannot be empty")
        tokens = text.split()
        if not tokens:
            raise TextFormError("Monomial text cannot be empty")
        if tokens == ['1']:
            return [], None

        modes = []
        gamma_poly = None
        for token in tokens:
            if token.startswith('g['):
                if gamma_poly is not None:
                    raise TextFormError(f"Gamma polynomial given twice in: {text}")
                gamma_poly = TextFormUtils.parse_gamma_poly(token)
            else:
                modes.append(TextFormUtils.parse_mode_token(token))
        return modes, gamma_poly

    @staticmethod
    def format_fraction(value: Fraction) -> str:
        """Format 3/1 as "3" and 3/2 as "3/2" """
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    @staticmethod
    def parse_vector_field(text: str) -> List[Tuple[Fraction, Dict[int, int], int]]:
        """
        Parse "2 x1^2 d2 - 1 x1 x2 d1" into (coefficient, {variable: exponent}, direction)
        triples. A missing coefficient means 1; "0" is the zero field.
        """
        if text is None or not text.strip():
            raise TextFormError("Vector field text cannot be empty")
        stripped = text.strip()
        if stripped == '0':
            return []

        terms = []
        position = 0
        for match in TextFormUtils.FIELD_TERM_PATTERN.finditer(stripped):
            gap = stripped[position:match.start()].strip()
            if gap:
                raise TextFormError(f"Unexpected text '{gap}' in vector field: {text}")
            if terms and match.group(1) is None:
                raise TextFormError(f"Missing sign between terms in vector field: {text}")
            position = match.end()

            sign = -1 if match.group(1) == '-' else 1
            coefficient = Fraction(match.group(2)) if match.group(2) else Fraction(1)
            exponents: Dict[int, int] = {}
            for var, exp in TextFormUtils.VARIABLE_PATTERN.findall(match.group(3) or ''):
                exponents[int(var)] = exponents.get(int(var), 0) + (int(exp) if exp else 1)
            terms.append((sign * coefficient, exponents, int(match.group(4))))

        if stripped[position:].strip() or not terms:
            raise TextFormError(f"Invalid vector field text: {text}")
        return terms


def configure_logging(level: str = "WARNING") -> None:
    """Route engine logs to stderr so report bytes on stdout stay clean"""
    root = logging.getLogger("app")
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    root.setLevel(level.upper())


# Create text_forms singleton instance
text_forms = TextFormUtils()
