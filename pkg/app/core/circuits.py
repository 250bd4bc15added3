"""
Boolean circuit families

Wires are numbered parameters first (0..k-1), randomness second (k..k+rho-1),
then one wire per gate in order. Evaluation is vectorized over many (z, r) pairs
with numpy boolean arrays; exact distributions come from counting outputs over
all 2^rho random strings.
"""

import functools
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.distributions import Distribution
from app.core.exceptions import CircuitError, SizeLimitError
from app.core.families import DistributionFamily
from app.models.circuit import CircuitSpec, FamilySummary, GateOp, GateSpec
from app.utils.bits import check_bits, from_int, to_int

logger = logging.getLogger(__name__)

# Random strings evaluated per batch when enumerating all of them
EVAL_CHUNK = 1 << 16

_REDUCERS = {
    GateOp.AND: np.logical_and,
    GateOp.OR: np.logical_or,
    GateOp.XOR: np.logical_xor,
}


class CircuitFamily(DistributionFamily):
    """Distribution family D(z; r) given by a validated circuit"""

    def __init__(self, spec: CircuitSpec):
        _validate(spec)
        super().__init__(spec.param_bits, spec.out_bits)
        self.spec = spec
        self.rand_bits = spec.rand_bits
        self.gates: tuple[tuple[GateOp, tuple[int, ...]], ...] = tuple(
            (gate.op, tuple(gate.inputs)) for gate in spec.gates
        )
        self.outputs = tuple(spec.outputs)
        self.role = spec.role
        self.b_wire = spec.b_wire
        self.bstar_wire = spec.bstar_wire
        self.input_wires = spec.param_bits + spec.rand_bits
        self.wire_count = self.input_wires + len(self.gates)

        # Last gate reading each wire, so intermediate arrays can be dropped early
        self._last_use: dict[int, int] = {}
        for index, (_, inputs) in enumerate(self.gates):
            for wire in inputs:
                self._last_use[wire] = index

    # Evaluation

    def wire_values(self, z_ints, r_ints, wires: Sequence[int]) -> list[np.ndarray]:
        """Boolean arrays of the requested wires for every (z, r) pair (broadcast)"""
        z_arr, r_arr = np.broadcast_arrays(
            np.asarray(z_ints, dtype=np.int64), np.asarray(r_ints, dtype=np.int64)
        )
        k, rho = self.param_bits, self.rand_bits
        keep = set(wires)
        values: dict[int, np.ndarray] = {}
        for i in range(k):
            values[i] = ((z_arr >> (k - 1 - i)) & 1).astype(bool)
        for j in range(rho):
            values[k + j] = ((r_arr >> (rho - 1 - j)) & 1).astype(bool)

        for index, (op, inputs) in enumerate(self.gates):
            operands = [values[w] for w in inputs]
            if op is GateOp.NOT:
                out = np.logical_not(operands[0])
            elif len(operands) == 1:
                out = operands[0].copy()
            else:
                out = functools.reduce(_REDUCERS[op], operands)
            values[self.input_wires + index] = out
            for w in inputs:
                if self._last_use.get(w) == index and w not in keep and w >= self.input_wires:
                    values.pop(w, None)
        return [values[w] for w in wires]

    def evaluate(self, z_ints, r_ints, wires: Optional[Sequence[int]] = None) -> np.ndarray:
        """Packed MSB-first integer value of ``wires`` (default: the outputs)"""
        wires = self.outputs if wires is None else tuple(wires)
        bits = self.wire_values(z_ints, r_ints, wires)
        packed = np.zeros(np.shape(bits[0]), dtype=np.int64)
        for bit in bits:
            packed = (packed << 1) | bit.astype(np.int64)
        return packed

    def count_vector(self, z: str, wires: Optional[Sequence[int]] = None) -> np.ndarray:
        """#{r : wires(z; r) = v} for every packed value v"""
        check_bits(z, self.param_bits, "parameter")
        width = len(self.outputs if wires is None else wires)
        counts = np.zeros(1 << width, dtype=np.int64)
        z_int = to_int(z)
        total = 1 << self.rand_bits
        for start in range(0, total, EVAL_CHUNK):
            r = np.arange(start, min(start + EVAL_CHUNK, total), dtype=np.int64)
            counts += np.bincount(self.evaluate(z_int, r, wires), minlength=1 << width)
        return counts

    # DistributionFamily interface

    def _compute_distribution(self, z: str) -> Distribution:
        counts = self.count_vector(z)
        denominator = 1 << self.rand_bits
        probs = {
            from_int(int(v), self.out_bits): Fraction(int(counts[v]), denominator)
            for v in np.flatnonzero(counts)
        }
        return Distribution(probs, self.out_bits)

    @property
    def coin_space(self) -> int:
        return 1 << self.rand_bits

    def outcome_ints(self, z: str, coins: np.ndarray) -> np.ndarray:
        coins = np.asarray(coins, dtype=np.int64)
        if coins.size > self.coin_space:
            # Tabulate every coin value once, then index
            table = self.evaluate(to_int(z), np.arange(self.coin_space, dtype=np.int64))
            return table[coins]
        return self.evaluate(to_int(z), coins)

    def summary(self, z: Optional[str] = None) -> FamilySummary:
        return FamilySummary(
            param_bits=self.param_bits,
            rand_bits=self.rand_bits,
            out_bits=self.out_bits,
            gate_count=len(self.gates),
            role=self.role,
            distribution=self.distribution(z).to_json() if z is not None else None,
        )

    def to_json(self) -> dict:
        return self.spec.model_dump(by_alias=True, exclude_none=True, mode="json")

    def describe(self) -> dict:
        info = super().describe()
        info.update(rand_bits=self.rand_bits, gate_count=len(self.gates))
        return info


def _validate(spec: CircuitSpec) -> None:
    if spec.param_bits > settings.MAX_PARAM_BITS:
        raise SizeLimitError(f"param_bits {spec.param_bits} exceeds cap {settings.MAX_PARAM_BITS}")
    if spec.rand_bits > settings.MAX_RAND_BITS:
        raise SizeLimitError(f"rand_bits {spec.rand_bits} exceeds cap {settings.MAX_RAND_BITS}")
    if spec.out_bits > settings.MAX_OUT_BITS:
        raise SizeLimitError(f"out_bits {spec.out_bits} exceeds cap {settings.MAX_OUT_BITS}")
    if len(spec.outputs) != spec.out_bits:
        raise CircuitError(f"{len(spec.outputs)} output wires listed for out_bits={spec.out_bits}")

    first_gate = spec.param_bits + spec.rand_bits
    for index, gate in enumerate(spec.gates):
        wire = first_gate + index
        if gate.op is GateOp.NOT and len(gate.inputs) != 1:
            raise CircuitError(f"gate {index} (NOT) needs exactly one input, got {len(gate.inputs)}")
        for source in gate.inputs:
            if not 0 <= source < wire:
                raise CircuitError(
                    f"gate {index} reads wire {source}; only wires 0..{wire - 1} exist before it"
                )

    wire_count = first_gate + len(spec.gates)
    for name, wires in (("output", spec.outputs), ("b", [spec.b_wire]), ("bstar", [spec.bstar_wire])):
        for w in wires:
            if w is not None and not 0 <= w < wire_count:
                raise CircuitError(f"{name} wire {w} out of range for a {wire_count}-wire circuit")
    if spec.role == "postselect" and (spec.b_wire is None or spec.bstar_wire is None):
        raise CircuitError("postselect circuits need b_wire and bstar_wire")


def compile_family(desc: str | dict | CircuitSpec) -> CircuitFamily:
    """Parse and validate circuit JSON (text, decoded dict or model)"""
    if isinstance(desc, CircuitSpec):
        spec = desc
    else:
        try:
            data = json.loads(desc) if isinstance(desc, (str, bytes)) else desc
            spec = CircuitSpec.model_validate(data)
        except json.JSONDecodeError as e:
            raise CircuitError(f"circuit JSON does not parse: {e}") from e
        except ValidationError as e:
            raise CircuitError(f"invalid circuit: {e.errors()[0]['msg']} at {e.errors()[0]['loc']}") from e
    family = CircuitFamily(spec)
    logger.debug("Compiled circuit family %s", family.describe())
    return family


def exact_prob(fam: DistributionFamily, z: str, x: str) -> Fraction:
    """Pr[x <- D(z)], exactly"""
    check_bits(z, fam.param_bits, "parameter")
    return fam.prob(z, x)


def dist_vector(fam: DistributionFamily, z: str) -> Distribution:
    return fam.distribution(z)


class CircuitBuilder:
    """Incremental construction of circuit families"""

    def __init__(self, param_bits: int, rand_bits: int):
        self.param_bits = param_bits
        self.rand_bits = rand_bits
        self.gates: list[GateSpec] = []
        self._const: dict[bool, int] = {}

    @property
    def next_wire(self) -> int:
        return self.param_bits + self.rand_bits + len(self.gates)

    def param(self, i: int) -> int:
        return i

    def rand(self, j: int) -> int:
        return self.param_bits + j

    def add(self, op: GateOp, *inputs: int) -> int:
        wire = self.next_wire
        self.gates.append(GateSpec(op=op, inputs=list(inputs)))
        return wire

    def not_(self, w: int) -> int:
        return self.add(GateOp.NOT, w)

    def and_(self, *ws: int) -> int:
        return self.add(GateOp.AND, *ws)

    def or_(self, *ws: int) -> int:
        return self.add(GateOp.OR, *ws)

    def xor_(self, *ws: int) -> int:
        return self.add(GateOp.XOR, *ws)

    def const(self, value: bool) -> int:
        if value not in self._const:
            if self.param_bits + self.rand_bits == 0:
                raise CircuitError("constants need at least one input wire")
            one = self.or_(0, self.not_(0))
            self._const[True] = one
            self._const[False] = self.not_(one)
        return self._const[value]

    def less_than(self, wires: Sequence[int], bound: int) -> int:
        """Wire that is 1 iff the MSB-first value on ``wires`` is < bound"""
        width = len(wires)
        if bound <= 0:
            return self.const(False)
        if bound >= 1 << width:
            return self.const(True)
        bound_bits = from_int(bound, width)
        terms, prefix = [], []
        for w, bit in zip(wires, bound_bits):
            if bit == "1":
                terms.append(self.and_(*prefix, self.not_(w)) if prefix else self.not_(w))
                prefix.append(w)
            else:
                prefix.append(self.not_(w))
        return self.or_(*terms)

    def mux(self, sel: int, if_zero: int, if_one: int) -> int:
        return self.or_(self.and_(self.not_(sel), if_zero), self.and_(sel, if_one))

    def embed(self, family: CircuitFamily, param_wires: Sequence[int], rand_wires: Sequence[int]) -> list[int]:
        """Copy ``family``'s gates onto the given input wires; returns its output wires"""
        if len(param_wires) != family.param_bits or len(rand_wires) != family.rand_bits:
            raise CircuitError("embedded circuit input wires do not match its signature")
        mapping = dict(enumerate(list(param_wires) + list(rand_wires)))
        for index, (op, inputs) in enumerate(family.gates):
            mapping[family.input_wires + index] = self.add(op, *(mapping[w] for w in inputs))
        return [mapping[w] for w in family.outputs]

    def build(self, outputs: Iterable[int], **annotations) -> CircuitFamily:
        outputs = list(outputs)
        spec = CircuitSpec(
            param_bits=self.param_bits,
            rand_bits=self.rand_bits,
            out_bits=len(outputs),
            gates=list(self.gates),
            outputs=outputs,
            **annotations,
        )
        return compile_family(spec)


def load_family(path: str | Path) -> CircuitFamily:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CircuitError(f"cannot read circuit file {path}: {e.strerror}") from e
    return compile_family(text)
