"""One-round quantum protocols between two senders and a referee.

Covers conditional disclosure of a quantum state (the quantum analogue of
CDS), one-round routing of a qubit to the side named by a boolean function,
and simultaneous-message computation with quantum resources. A protocol
execution is never sampled: ``run(x, y, carrier, q_reg)`` returns every
classical branch as a (probability, transcript, residual state) triple, so
verifiers can compute exact figures of merit.

Verification uses two complementary views:

* correctness feeds half an EPR pair through the protocol and compares the
  recovered output against the untouched reference half, i.e. it checks the
  whole channel at once through its Choi state;
* secrecy treats the referee view as a transcript-indexed block-diagonal
  operator and measures, block by block, how far it sits from the product of
  its marginals (or from the view of another run that should look the same).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .boolfn import BoolFn
from .errors import BudgetError, ValidationError
from .gardenhose import GhStrategy, LEFT, RIGHT, gh_eval, gh_verify
from .protocols import CdsProtocol, PsmProtocol, cds_parallel
from .quantum import (MAX_QUBITS, PAULI_EIGENSTATES, PureState, U_BELL,
                      epr_pairs, fidelity, phased_pad, random_qubit)

DEFAULT_BRANCH_BUDGET = 1 << 24

_PHI = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_PLUS_DM = np.outer(_PHI, _PHI.conj())

KEYS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class RunBranch:
    """One classical branch of a protocol run."""

    prob: float
    transcript: tuple
    state: Optional[PureState]


@dataclass
class QVerificationReport:
    """Exact-to-float verification outcome of a quantum protocol.

    ``worst_infidelity`` is 1 - F over the inputs where the output must be
    delivered; ``worst_gap`` is the largest decoupling gap (or pairwise view
    distance) over the inputs where it must stay hidden.
    """

    kind: str
    worst_infidelity: float
    worst_gap: float
    per_input: dict = field(default_factory=dict)
    max_branches: int = 0
    routing_consistent: bool = True
    resources: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    notes: tuple = ()

    def perfect(self, tol: float = 1e-9) -> bool:
        return (self.worst_infidelity <= tol and self.worst_gap <= tol
                and self.routing_consistent)

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "worst_infidelity": float(self.worst_infidelity),
            "worst_gap": float(self.worst_gap),
            "max_branches": self.max_branches,
            "routing_consistent": self.routing_consistent,
            "per_input": {f"{x},{y}": {k: (float(v) if isinstance(v, (int, float))
                                            else v)
                                       for k, v in sorted(info.items())}
                          for (x, y), info in sorted(self.per_input.items())},
            "resources": {k: self.resources[k] for k in sorted(self.resources)},
            "witnesses": {k: list(v) if isinstance(v, tuple) else v
                          for k, v in sorted(self.witnesses.items())},
            "notes": list(self.notes),
        }


@dataclass
class CdqsProtocol:
    """Conditional disclosure of a quantum state held by Alice.

    The secret qubit enters in register ``q_reg`` of the carrier state and the
    referee receives the registers named by ``msg_regs`` plus the transcript.
    ``recover`` must restore the secret into ``out_reg`` when f(x, y) = 1.
    """

    f: BoolFn
    run: Callable                 # (x, y, carrier, q_reg) -> [RunBranch]
    msg_regs: Callable            # (x, y) -> tuple of register names
    recover: Callable             # (x, y, transcript, state) -> PureState
    out_reg: Callable             # (x, y) -> register name
    key_cds: Optional[CdsProtocol] = None
    domain: Optional[tuple] = None
    resources: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def input_pairs(self):
        return tuple(self.f.inputs()) if self.domain is None else tuple(self.domain)


@dataclass
class FRoutingProtocol:
    """Route a qubit left or right according to f in one simultaneous round.

    ``exit_info`` names the side and, for branch-verifiable protocols, the
    register where the qubit lands; ``correction`` undoes the accumulated
    frame. Protocols whose left side reconstructs the qubit by local decoding
    instead of holding a branch register supply ``left_fidelity``.
    """

    f: BoolFn
    run: Callable                 # (x, y, carrier, q_reg) -> [RunBranch]
    exit_info: Callable           # (x, y) -> (side, reg name or None)
    correction: Callable          # (x, y, transcript) -> 2x2 matrix
    holdings: Callable = None     # (x, y) -> {"left": regs, "right": regs}
    left_fidelity: Optional[Callable] = None  # (x, y, psi_vec) -> float
    domain: Optional[tuple] = None
    resources: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def input_pairs(self):
        return tuple(self.f.inputs()) if self.domain is None else tuple(self.domain)


@dataclass
class PsqmProtocol:
    """Simultaneous messages computing f; the referee sees messages only.

    ``run`` enumerates transcript branches; ``quantum_regs`` names any message
    registers carried by branch states (empty for purely classical schemes).
    """

    f: BoolFn
    run: Callable                 # (x, y) -> [RunBranch]
    decode: Callable              # (transcript) -> value of f
    quantum_regs: tuple = ()
    domain: Optional[tuple] = None
    resources: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def input_pairs(self):
        return tuple(self.f.inputs()) if self.domain is None else tuple(self.domain)


# -- shared verification plumbing ---------------------------------------------


def _cached_ptrace(cache: dict, state: PureState, regs: tuple) -> np.ndarray:
    key = (id(state), regs)
    got = cache.get(key)
    if got is None:
        got = state.ptrace(list(regs)).mat
        cache[key] = (got, state)   # keep the state alive so ids stay unique
        return got
    return got[0]


def _block_gap(blocks: dict, d_ref: int) -> float:
    """Half trace norm of (block-diagonal view) minus (marginal product)."""
    if not blocks:
        return 0.0
    mats = np.stack(list(blocks.values()))
    t, d, _ = mats.shape
    d_msg = d // d_ref
    sigma_ref = np.einsum("tikjk->ij", mats.reshape(t, d_ref, d_msg, d_ref, d_msg))
    msg = np.einsum("tkikj->tij", mats.reshape(t, d_ref, d_msg, d_ref, d_msg))
    prods = np.einsum("ab,tcd->tacbd", sigma_ref, msg).reshape(t, d, d)
    vals = np.linalg.eigvalsh(mats - prods)
    return float(0.5 * np.abs(vals).sum())


def _block_distance(blocks_a: dict, blocks_b: dict) -> float:
    keys = sorted(set(blocks_a) | set(blocks_b), key=repr)
    if not keys:
        return 0.0
    d = next(iter(blocks_a.values())).shape[0] if blocks_a else \
        next(iter(blocks_b.values())).shape[0]
    zero = np.zeros((d, d), dtype=complex)
    diffs = np.stack([blocks_a.get(k, zero) - blocks_b.get(k, zero) for k in keys])
    vals = np.linalg.eigvalsh(diffs)
    return float(0.5 * np.abs(vals).sum())


def verify_cdqs(P: CdqsProtocol, budget: int = DEFAULT_BRANCH_BUDGET) -> QVerificationReport:
    """Choi-state correctness on revealing inputs, decoupling on hiding ones."""
    per_input = {}
    worst_inf = 0.0
    worst_gap = 0.0
    max_branches = 0
    witnesses = {}
    total_branches = 0
    for (x, y) in P.input_pairs():
        carrier = epr_pairs([("R", "Q")])
        branches = P.run(x, y, carrier, "Q")
        total_branches += len(branches)
        if total_branches > budget:
            raise BudgetError(f"branch count {total_branches} exceeds {budget}")
        max_branches = max(max_branches, len(branches))
        fx = P.f.eval(x, y)
        cache = {}
        if fx == 1:
            out = P.out_reg(x, y)
            rho = np.zeros((4, 4), dtype=complex)
            for b in branches:
                rec = P.recover(x, y, b.transcript, b.state)
                rho += b.prob * _cached_ptrace(cache, rec, ("R", out))
            F = fidelity(rho, PHI_PLUS_DM)
            per_input[(x, y)] = {"f": 1, "fidelity": F, "branches": len(branches)}
            if 1 - F > worst_inf:
                worst_inf = 1 - F
                witnesses["infidelity"] = (x, y)
        else:
            msg = tuple(P.msg_regs(x, y))
            blocks = {}
            for b in branches:
                mat = _cached_ptrace(cache, b.state, ("R",) + msg)
                got = blocks.get(b.transcript)
                blocks[b.transcript] = b.prob * mat if got is None else got + b.prob * mat
            gap = _block_gap(blocks, d_ref=2)
            per_input[(x, y)] = {"f": 0, "gap": gap, "branches": len(branches)}
            if gap > worst_gap:
                worst_gap = gap
                witnesses["gap"] = (x, y)
    return QVerificationReport("cdqs", worst_inf, worst_gap, per_input,
                               max_branches, True, dict(P.resources), witnesses)


def verify_frouting(P: FRoutingProtocol, sweep_seeds=range(10),
                    budget: int = DEFAULT_BRANCH_BUDGET) -> QVerificationReport:
    """Delivered-qubit fidelity on both sides, worst case over inputs.

    Branch-register sides are checked through the Choi state; sides that
    reconstruct by local decoding are swept over the six Pauli eigenstates
    plus seeded random qubits, keeping the worst fidelity.
    """
    per_input = {}
    worst_inf = 0.0
    max_branches = 0
    consistent = True
    witnesses = {}
    total_branches = 0
    sweep = [vec for (_, vec) in PAULI_EIGENSTATES]
    sweep += [random_qubit(seed).vec for seed in sweep_seeds]
    for (x, y) in P.input_pairs():
        fx = P.f.eval(x, y)
        side, reg = P.exit_info(x, y)
        if (side == RIGHT) != (fx == 1):
            consistent = False
            witnesses["side"] = (x, y)
        if reg is not None:
            carrier = epr_pairs([("R", "Q")])
            branches = P.run(x, y, carrier, "Q")
            total_branches += len(branches)
            if total_branches > budget:
                raise BudgetError(f"branch count {total_branches} exceeds {budget}")
            max_branches = max(max_branches, len(branches))
            cache = {}
            rho = np.zeros((4, 4), dtype=complex)
            for b in branches:
                fixed = b.state.apply(P.correction(x, y, b.transcript), [reg])
                rho += b.prob * _cached_ptrace(cache, fixed, ("R", reg))
            F = fidelity(rho, PHI_PLUS_DM)
            per_input[(x, y)] = {"f": fx, "side": side, "fidelity": F,
                                 "branches": len(branches)}
        else:
            if P.left_fidelity is None:
                raise ValidationError("no register and no local reconstruction")
            F = min(P.left_fidelity(x, y, vec) for vec in sweep)
            per_input[(x, y)] = {"f": fx, "side": side, "fidelity": F,
                                 "branches": 0}
        if 1 - F > worst_inf:
            worst_inf = 1 - F
            witnesses["infidelity"] = (x, y)
    return QVerificationReport("frouting", worst_inf, 0.0, per_input,
                               max_branches, consistent, dict(P.resources),
                               witnesses)


def verify_psqm(P: PsqmProtocol, budget: int = DEFAULT_BRANCH_BUDGET) -> QVerificationReport:
    """Decode accuracy on every input; view distance across equal-value inputs."""
    pairs = P.input_pairs()
    views = {}
    per_input = {}
    worst_eps = 0.0
    max_branches = 0
    witnesses = {}
    total_branches = 0
    for (x, y) in pairs:
        branches = P.run(x, y)
        total_branches += len(branches)
        if total_branches > budget:
            raise BudgetError(f"branch count {total_branches} exceeds {budget}")
        max_branches = max(max_branches, len(branches))
        fx = P.f.eval(x, y)
        fail = 0.0
        blocks = {}
        cache = {}
        for b in branches:
            if P.decode(b.transcript) != fx:
                fail += b.prob
            if P.quantum_regs and b.state is not None:
                mat = _cached_ptrace(cache, b.state, tuple(P.quantum_regs))
            else:
                mat = np.array([[1.0 + 0j]])
            got = blocks.get(b.transcript)
            blocks[b.transcript] = b.prob * mat if got is None else got + b.prob * mat
        views[(x, y)] = blocks
        per_input[(x, y)] = {"f": fx, "decode_error": fail, "branches": len(branches)}
        if fail > worst_eps:
            worst_eps = fail
            witnesses["decode"] = (x, y)
    worst_gap = 0.0
    for i, a in enumerate(pairs):
        for b in pairs[i + 1:]:
            if P.f.eval(*a) != P.f.eval(*b):
                continue
            d = _block_distance(views[a], views[b])
            if d > worst_gap:
                worst_gap = d
                witnesses["view"] = (a, b)
    return QVerificationReport("psqm", worst_eps, worst_gap, per_input,
                               max_branches, True, dict(P.resources), witnesses)


def security_state_sweep(P: CdqsProtocol, seeds=range(10)) -> dict:
    """Max pairwise referee-view distance across concrete secret qubits.

    Runs every hiding input with the six Pauli eigenstates and seeded random
    qubits as the secret; a protocol that leaks nothing produces views at
    distance zero from each other.
    """
    states = [(name, PureState.from_qubit("Q", vec))
              for (name, vec) in PAULI_EIGENSTATES]
    states += [(f"rand{seed}", random_qubit(seed).rename({"q": "Q"}))
               for seed in seeds]
    worst = 0.0
    per_input = {}
    witness = None
    for (x, y) in P.input_pairs():
        if P.f.eval(x, y) != 0:
            continue
        msg = tuple(P.msg_regs(x, y))
        blocks_by_state = []
        for name, st in states:
            cache = {}
            blocks = {}
            for b in P.run(x, y, st, "Q"):
                mat = _cached_ptrace(cache, b.state, msg)
                got = blocks.get(b.transcript)
                blocks[b.transcript] = (b.prob * mat if got is None
                                        else got + b.prob * mat)
            blocks_by_state.append((name, blocks))
        local = 0.0
        for i in range(len(blocks_by_state)):
            for j in range(i + 1, len(blocks_by_state)):
                d = _block_distance(blocks_by_state[i][1], blocks_by_state[j][1])
                if d > local:
                    local = d
                    if d > worst:
                        worst = d
                        witness = (x, y, blocks_by_state[i][0], blocks_by_state[j][0])
        per_input[(x, y)] = local
    return {"worst": worst, "per_input": per_input, "witness": witness,
            "n_states": len(states)}


# -- pad machinery -------------------------------------------------------------


def pauli_frame(outcomes) -> np.ndarray:
    """Correction undoing a chain of teleportation byproducts.

    Outcome (a, b) at step t means X^a Z^b hit the carried state; later steps
    act on the already-twisted state, so the net twist is the ordered product
    and the correction is its adjoint.
    """
    net = np.eye(2, dtype=complex)
    for (a, b) in outcomes:
        step = np.linalg.matrix_power(np.array([[0, 1], [1, 0]], complex), a)
        stepz = np.linalg.matrix_power(np.diag([1, -1]).astype(complex), b)
        net = (step @ stepz) @ net
    return net.conj().T


def otp_reconstruct_left(K: CdsProtocol, x: int, y: int, psi) -> float:
    """Sender-side recovery probability of a pad key kept in superposition.

    Alice pads her qubit with the key register held in uniform superposition
    and keeps that register while the messages disclosing the key travel out.
    Against the minimal purification of the message distribution, rotating the
    key register through the pad-to-EPR basis swaps the qubit back into her
    hands exactly when the messages carry no key information. Returns the
    squared overlap with the ideal state: 1 when the key stays hidden, and
    1/2 when the messages pin the key down completely.
    """
    psi = np.asarray(psi, dtype=complex).reshape(2)
    psi = psi / np.linalg.norm(psi)
    hists = _transcript_hists(K, x, y)
    union = set()
    for s in KEYS:
        union.update(hists[s])
    order = {m: i for i, m in enumerate(sorted(union, key=repr))}
    kq = max(1, math.ceil(math.log2(max(2, len(order)))))
    if 3 + kq > MAX_QUBITS:
        raise BudgetError(f"message register needs {kq} qubits")
    vec = np.zeros(1 << (3 + kq), dtype=complex)
    for s, hist in hists.items():
        padded = phased_pad(*s) @ psi
        base = ((s[0] << 1) | s[1]) << (1 + kq)
        for m, prob in hist.items():
            amp = 0.5 * math.sqrt(prob)
            idx = base | order[m]
            vec[idx] += amp * padded[0]
            vec[idx | (1 << kq)] += amp * padded[1]
    state = PureState((("A1", 1), ("A2", 1), ("Q", 1), ("M", kq)), vec)
    state = state.apply(U_BELL, ["A1", "A2"])
    rho = state.ptrace(["A2"]).mat
    return float(np.real(psi.conj() @ rho @ psi))


# -- compilers -----------------------------------------------------------------


def _transcript_hists(K: CdsProtocol, x: int, y: int) -> dict:
    """Per-key message histograms of a key-disclosing scheme, as probabilities.

    Honors a ``message_hists`` shortcut in the protocol's meta (parallel
    compositions factorize instead of sweeping their product space).
    """
    fast = K.meta.get("message_hists")
    if fast is not None:
        return fast(x, y)
    joint = len(K.shared) * len(K.alice_private) * len(K.bob_private)
    out = {}
    for s in KEYS:
        hist = {}
        for r in K.shared:
            for ra in K.alice_private:
                m0 = K.alice_msg(x, s, r, ra)
                for rb in K.bob_private:
                    m = (m0, K.bob_msg(y, r, rb))
                    hist[m] = hist.get(m, 0) + 1
        out[s] = {m: c / joint for m, c in hist.items()}
    return out


def cdqs_from_cds(C: CdsProtocol) -> CdqsProtocol:
    """Quantum one-time pad keyed by two secret bits a classical CDS hides.

    Alice pads the secret qubit with the two-bit key and sends it along; two
    parallel runs of the bit-CDS disclose the key exactly on revealing inputs.
    Hiding inputs leave the pad key uniform to the referee, so the qubit they
    hold is maximally mixed and decoupled.
    """
    if set(C.secrets) != {0, 1}:
        raise ValidationError("need a single-bit CDS")
    K = cds_parallel(C, 2)
    pad_cache = {}
    rec_cache = {}

    def run(x, y, carrier, q_reg):
        hists = _transcript_hists(K, x, y)
        branches = []
        for s in KEYS:
            padded = carrier.apply(phased_pad(*s), [q_reg])
            for m, p in hists[s].items():
                branches.append(RunBranch(0.25 * p, m, padded))
        return branches

    def msg_regs(x, y):
        return ("Q",)

    def recover(x, y, transcript, state):
        m0, m1 = transcript
        s = K.decode(m0, x, m1, y)
        if s is None or any(v not in (0, 1) for v in s):
            return state
        key = (id(state), s)
        got = rec_cache.get(key)
        if got is None:
            got = state.apply(phased_pad(*s).conj().T, ["Q"])
            rec_cache[key] = (got, state)
            return got
        return got[0]

    def out_reg(x, y):
        return "Q"

    resources = {"pad_key_bits": 2, "qubits_sent": 1,
                 "cds_randomness_states": len(K.shared)}
    meta = {"kind": "cdqs", "compiler": "cdqs_from_cds",
            "parameters": {"cds": C.meta}}
    return CdqsProtocol(C.f, run, msg_regs, recover, out_reg, key_cds=K,
                        domain=C.domain, resources=resources, meta=meta)


def frouting_from_gh(strategy: GhStrategy, f: BoolFn) -> FRoutingProtocol:
    """Teleport the qubit along the water path, one EPR link per pipe.

    Alice teleports into her tap pipe; every joined pair of pipe ends becomes
    a Bell measurement that forwards the qubit, and the broadcast outcomes fix
    the Pauli frame. The qubit lands on the spill side: left register when
    f = 0, right when f = 1.
    """
    if not gh_verify(strategy, f):
        raise ValidationError("strategy does not compute f")
    m = strategy.pipes

    def plan_for(x, y):
        outcome = gh_eval(strategy, x, y)
        plan = [("q", f"L{outcome.path[0][0]}", ("alice", 0, outcome.path[0][0]))]
        for (prev, cur) in zip(outcome.path, outcome.path[1:]):
            if cur[1] == "rl":
                plan.append((f"R{prev[0]}", f"R{cur[0]}",
                             ("bob", prev[0], cur[0])))
            else:
                plan.append((f"L{prev[0]}", f"L{cur[0]}",
                             ("alice", prev[0], cur[0])))
        last_pipe, last_dir = outcome.path[-1]
        exit_reg = (f"R{last_pipe}" if last_dir == "lr" else f"L{last_pipe}")
        return plan, outcome.side, exit_reg

    def run(x, y, carrier, q_reg):
        plan, _, _ = plan_for(x, y)
        state = carrier.tensor(epr_pairs([(f"L{i}", f"R{i}")
                                          for i in range(1, m + 1)]))
        branches = [(1.0, (), state)]
        for (reg_a, reg_b, desc) in plan:
            ra = q_reg if reg_a == "q" else reg_a
            nxt = []
            for (p, t, st) in branches:
                for (ab, q, st2) in st.bell_measure(ra, reg_b):
                    nxt.append((p * q, t + ((desc, ab),), st2))
            branches = nxt
        return [RunBranch(p, t, st) for (p, t, st) in branches]

    def exit_info(x, y):
        _, side, reg = plan_for(x, y)
        return side, reg

    def correction(x, y, transcript):
        return pauli_frame([ab for (_, ab) in transcript])

    def holdings(x, y):
        plan, _, _ = plan_for(x, y)
        measured = {r for (a, b, _) in plan for r in (a, b)}
        left = tuple(f"L{i}" for i in range(1, m + 1) if f"L{i}" not in measured)
        right = tuple(f"R{i}" for i in range(1, m + 1) if f"R{i}" not in measured)
        return {"left": left, "right": right}

    resources = {"epr_pairs": m, "pipes": m,
                 "bound_epr_equals_pipes": True}
    meta = {"kind": "frouting", "compiler": "frouting_from_gh",
            "parameters": {"strategy": strategy.to_json(), "f": f.to_json()}}
    return FRoutingProtocol(f, run, exit_info, correction, holdings=holdings,
                            resources=resources, meta=meta)


def frouting_from_cdqs(C: CdqsProtocol) -> FRoutingProtocol:
    """Pad-and-disclose routing: the key travels only where f allows.

    Alice pads the qubit and sends it right while a key-disclosing scheme runs
    underneath. Revealing inputs let the right side decode the key and unpad.
    On hiding inputs the messages carry no key information, so Alice, who kept
    her key register coherent, can rotate it through the pad-to-EPR basis and
    swap the qubit back onto her side.
    """
    if C.key_cds is None:
        raise ValidationError("need a protocol exposing its key-disclosing scheme")
    K = C.key_cds
    f = C.f
    pad_states = {}

    def run(x, y, carrier, q_reg):
        hists = _transcript_hists(K, x, y)
        branches = []
        for s in KEYS:
            key = (id(carrier), s)
            got = pad_states.get(key)
            if got is None:
                got = (carrier.apply(phased_pad(*s), [q_reg]), carrier)
                pad_states[key] = got
            padded = got[0]
            for m, p in hists[s].items():
                branches.append(RunBranch(0.25 * p, m, padded))
        return branches

    def exit_info(x, y):
        if f.eval(x, y) == 1:
            return RIGHT, "Q"
        return LEFT, None

    def correction(x, y, transcript):
        m0, m1 = transcript
        s = K.decode(m0, x, m1, y)
        if s is None or any(v not in (0, 1) for v in s):
            return np.eye(2, dtype=complex)
        return phased_pad(*s).conj().T

    def holdings(x, y):
        return {"left": (), "right": ("Q",)}

    def left_fidelity(x, y, psi):
        return otp_reconstruct_left(K, x, y, psi)

    resources = dict(C.resources)
    resources["qubits_sent"] = 1
    meta = {"kind": "frouting", "compiler": "frouting_from_cdqs",
            "parameters": {"cdqs": C.meta}}
    return FRoutingProtocol(f, run, exit_info, correction, holdings=holdings,
                            left_fidelity=left_fidelity, domain=C.domain,
                            resources=resources, meta=meta)


def cdqs_from_frouting(R: FRoutingProtocol) -> CdqsProtocol:
    """Disclose a qubit by routing it: the right side forwards everything.

    Run the router on the secret qubit; the referee receives the transcript
    and every register the right side holds. When f = 1 the qubit sits in one
    of them and the frame correction restores it; when f = 0 it never crossed,
    so the forwarded registers are independent of the secret.
    """
    if R.holdings is None:
        raise ValidationError("router must expose per-side register holdings")
    f = R.f

    def run(x, y, carrier, q_reg):
        return R.run(x, y, carrier, q_reg)

    def msg_regs(x, y):
        return tuple(R.holdings(x, y)["right"])

    def recover(x, y, transcript, state):
        side, reg = R.exit_info(x, y)
        if side != RIGHT or reg is None:
            return state
        return state.apply(R.correction(x, y, transcript), [reg])

    def out_reg(x, y):
        _, reg = R.exit_info(x, y)
        return reg

    resources = dict(R.resources)
    meta = {"kind": "cdqs", "compiler": "cdqs_from_frouting",
            "parameters": {"frouting": R.meta}}
    return CdqsProtocol(f, run, msg_regs, recover, out_reg, domain=R.domain,
                        resources=resources, meta=meta)


def psqm_from_psm(P: PsmProtocol) -> PsqmProtocol:
    """A classical PSM is a simultaneous-message protocol with no qubits."""

    def run(x, y):
        joint = len(P.shared) * len(P.alice_private) * len(P.bob_private)
        hist = {}
        for r in P.shared:
            for ra in P.alice_private:
                m0 = P.alice_msg(x, r, ra)
                for rb in P.bob_private:
                    m = (m0, P.bob_msg(y, r, rb))
                    hist[m] = hist.get(m, 0) + 1
        return [RunBranch(c / joint, m, None) for m, c in
                sorted(hist.items(), key=lambda kv: repr(kv[0]))]

    def decode(transcript):
        m0, m1 = transcript
        return P.decode(m0, m1)

    meta = {"kind": "psqm", "compiler": "psqm_from_psm",
            "parameters": {"psm": P.meta}}
    return PsqmProtocol(P.f, run, decode, quantum_regs=(), domain=P.domain,
                        resources=dict(P.resources), meta=meta)


def cdqs_from_psqm(P: PsqmProtocol, substitute=None) -> CdqsProtocol:
    """Pad the qubit with two shared bits; leak each bit through one masked run.

    For each key bit the parties either use their real inputs or a fixed
    hiding input, so the run computes (key bit) AND f(x, y). Revealing inputs
    hand the referee both key bits; hiding inputs make every run's view
    key-independent, leaving the pad intact.
    """
    if P.quantum_regs:
        raise ValidationError("only classical-message protocols can be lifted here")
    f = P.f
    pairs = P.input_pairs()
    if substitute is None:
        substitute = next(((x, y) for (x, y) in pairs if f.eval(x, y) == 0), None)
        if substitute is None:
            raise ValidationError("no hiding input available to mask with")
    x_star, y_star = substitute
    if f.eval(x_star, y_star) != 0:
        raise ValidationError("substitute input must evaluate to 0")

    hist_cache = {}
    rec_cache = {}

    def hist_for(x, y):
        got = hist_cache.get((x, y))
        if got is None:
            got = {b.transcript: b.prob for b in P.run(x, y)}
            hist_cache[(x, y)] = got
        return got

    def run(x, y, carrier, q_reg):
        branches = []
        for s1, s2 in KEYS:
            padded = carrier.apply(phased_pad(s1, s2), [q_reg])
            h1 = hist_for(x if s1 else x_star, y if s1 else y_star)
            h2 = hist_for(x if s2 else x_star, y if s2 else y_star)
            for t1, p1 in h1.items():
                for t2, p2 in h2.items():
                    branches.append(RunBranch(0.25 * p1 * p2, (t1, t2), padded))
        return branches

    def msg_regs(x, y):
        return ("Q",)

    def recover(x, y, transcript, state):
        t1, t2 = transcript
        s = (P.decode(t1), P.decode(t2))
        if any(v not in (0, 1) for v in s):
            return state
        key = (id(state), s)
        got = rec_cache.get(key)
        if got is None:
            got = (state.apply(phased_pad(*s).conj().T, ["Q"]), state)
            rec_cache[key] = got
        return got[0]

    def out_reg(x, y):
        return "Q"

    resources = {"pad_key_bits": 2, "qubits_sent": 1, "runs": 2}
    meta = {"kind": "cdqs", "compiler": "cdqs_from_psqm",
            "parameters": {"psqm": P.meta, "substitute": [x_star, y_star]}}
    return CdqsProtocol(f, run, msg_regs, recover, out_reg, domain=P.domain,
                        resources=resources, meta=meta)
