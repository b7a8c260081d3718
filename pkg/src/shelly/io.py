"""JSON readers and writers for domains, bodies, problems and graphs."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .domains import (Box, Congruence, ConvexBody, DomainSpec, LinearConstraint,
                      QuadraticConstraint)
from .problems import (BallSampler, ChanceProblem, FiniteOmega, Generative, HalfplaneSampler)

SAMPLERS = {"halfplane": HalfplaneSampler, "ball": BallSampler}


def _num(v) -> float | None:
    """JSON cannot hold infinities; unbounded box sides travel as null."""
    return None if v is None or math.isinf(v) else float(v)


# -- domains -----------------------------------------------------------------

def domain_from_json(data: dict) -> DomainSpec:
    kind = data["kind"]
    d = int(data["dimension"])
    override = data.get("helly_override")
    if kind == "reals":
        return DomainSpec.reals(d, override)
    if kind == "integers":
        return DomainSpec.integers(d, override)
    if kind == "mixed":
        m = int(data["num_integer"])
        return DomainSpec.mixed(m, d - m, override)
    if kind == "finite":
        spec = DomainSpec.finite(data["points"], override)
        if spec.dimension != d:
            raise ValueError("finite points do not match the declared dimension")
        return spec
    if kind == "lattice_minus":
        m = int(data.get("num_integer", d))
        exclusions = [Congruence(tuple(e["a"]), int(e["q"]), int(e["r"]))
                      for e in data.get("exclusions", [])]
        return DomainSpec.lattice_minus(m, exclusions, num_continuous=d - m,
                                        helly_override=override)
    raise ValueError(f"unknown domain kind {kind!r}")


def domain_to_json(spec: DomainSpec) -> dict:
    out = {"kind": spec.kind, "dimension": spec.dimension}
    if spec.kind in ("mixed", "lattice_minus"):
        out["num_integer"] = spec.num_integer
    if spec.kind == "finite":
        out["points"] = np.asarray(spec.points).tolist()
    if spec.kind == "lattice_minus":
        out["exclusions"] = [{"a": list(e.a), "q": e.q, "r": e.r} for e in spec.exclusions]
    if spec.helly_override is not None:
        out["helly_override"] = spec.helly_override
    return out


# -- constraints and bodies ----------------------------------------------------

def constraint_from_json(data: dict):
    label = data.get("label")
    if "Q" in data:
        return QuadraticConstraint(data["Q"], data["q"], float(data.get("c0", 0.0)), label=label)
    return LinearConstraint(data["a"], float(data["b"]), label=label)


def constraint_to_json(con) -> dict:
    if isinstance(con, LinearConstraint):
        out = {"a": con.a.tolist(), "b": float(con.b)}
    else:
        out = {"Q": con.Q.tolist(), "q": con.q.tolist(), "c0": float(con.c0)}
    if con.label is not None:
        out["label"] = con.label
    return out


def box_from_json(data) -> Box | None:
    if data is None:
        return None
    if isinstance(data, dict):
        return Box.from_pairs(zip(data["lower"], data["upper"]))
    return Box.from_pairs(data)


def box_to_json(box: Box | None):
    if box is None:
        return None
    return {"lower": [_num(v) for v in box.lower], "upper": [_num(v) for v in box.upper]}


def body_from_json(data: dict) -> ConvexBody:
    return ConvexBody([constraint_from_json(c) for c in data.get("constraints", [])],
                      box_from_json(data.get("box")))


def body_to_json(body: ConvexBody) -> dict:
    return {"constraints": [constraint_to_json(c) for c in body.constraints],
            "box": box_to_json(body.box)}


# -- models and problems -------------------------------------------------------

def model_from_json(data: dict | None):
    if not data:
        return FiniteOmega.empty()
    if "finite" in data:
        atoms = data["finite"]
        return FiniteOmega([float(a["w"]) for a in atoms], [constraint_from_json(a) for a in atoms])
    if "generator" in data:
        gen = dict(data["generator"])
        kind = gen.pop("kind")
        if kind not in SAMPLERS:
            raise ValueError(f"unknown generator kind {kind!r}")
        return Generative(SAMPLERS[kind](**gen))
    raise ValueError("model needs a 'finite' or 'generator' entry")


def model_to_json(model) -> dict:
    if isinstance(model, FiniteOmega):
        return {"finite": [dict(constraint_to_json(c), w=float(w))
                           for w, c in zip(model.weights, model.constraints)]}
    to_dict = getattr(model.sampler, "to_dict", None)
    if to_dict is None:
        raise ValueError("only the built-in samplers can be written as JSON")
    return {"generator": to_dict()}


def problem_from_json(data: dict) -> ChanceProblem:
    return ChanceProblem(np.asarray(data["objective"], dtype=float), body_from_json(data["K"]),
                         domain_from_json(data["domain"]), model_from_json(data.get("model")),
                         float(data.get("epsilon", 1.0)), float(data.get("delta", 0.5)))


def problem_to_json(problem: ChanceProblem) -> dict:
    return {"objective": problem.objective.tolist(), "K": body_to_json(problem.deterministic_set),
            "domain": domain_to_json(problem.domain), "model": model_to_json(problem.model),
            "epsilon": problem.epsilon, "delta": problem.delta}


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True)


# -- graphs --------------------------------------------------------------------

def read_edge_list(text: str) -> tuple[list[tuple[int, int]], int]:
    """``u v`` per line, 0-indexed; blank lines and ``#`` comments ignored.

    The vertex count is one more than the largest index seen.
    """
    edges = []
    n = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u < 0 or v < 0:
            raise ValueError(f"line {lineno}: vertex indices must be nonnegative")
        edges.append((u, v))
        n = max(n, u + 1, v + 1)
    return edges, n
