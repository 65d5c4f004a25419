"""Sewing patterns as panels of quadratic Bezier loops.

A pattern is a set of disconnected 2D panels, each bounded by a closed
counterclockwise loop of quadratic Bezier edges, plus stitch
correspondences between panel boundary edges and optional mirror-symmetry
constraints on the curve vertices.  All lengths are meters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# Mirror about the vertical axis.
FLIP_MATRIX = np.array([[-1.0, 0.0], [0.0, 1.0]])

ARC_SUBDIV = 256  # piecewise-linear subdivisions for arc-length inversion


@dataclass
class BezierEdge:
    """One boundary curve: start/end vertex indices into the panel vertex list.

    `control` is the quadratic control point; None means a straight
    segment (equivalent to a control at the chord midpoint).
    """

    start: int
    end: int
    control: np.ndarray | None = None

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError(f"degenerate edge {self.start}->{self.end}")
        if self.control is not None:
            self.control = np.asarray(self.control, dtype=float)
            if not np.all(np.isfinite(self.control)):
                raise ValueError("non-finite control point")


@dataclass
class Panel:
    """A closed CCW loop of Bezier edges with a rigid 3D placement."""

    name: str
    vertices: np.ndarray          # (nv, 2)
    edges: list[BezierEdge]
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))   # 3x3
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        self.rotation = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        self.translation = np.asarray(self.translation, dtype=float).reshape(3)
        n = len(self.edges)
        for k, e in enumerate(self.edges):
            if e.end != self.edges[(k + 1) % n].start:
                raise ValueError(
                    f"panel {self.name}: edges {k} and {(k + 1) % n} do not chain")

    def place3d(self, uv: np.ndarray) -> np.ndarray:
        """Map 2D panel coordinates (n,2) to 3D world positions (n,3)."""
        p = np.concatenate([uv, np.zeros((len(uv), 1))], axis=1)
        return p @ self.rotation.T + self.translation


@dataclass
class Stitch:
    """Sew edge `(panel_a, edge_a)` to `(panel_b, edge_b)`.

    With reversed=True the k-th sample of side a matches the
    (n-1-k)-th sample of side b.
    """

    panel_a: str
    edge_a: int
    panel_b: str
    edge_b: int
    reversed: bool = False


@dataclass
class SymmetrySpec:
    """Mirror constraints: segment (i,j) mirrors segment (k,l), global indices."""

    pairs: list[tuple[int, int, int, int]] = field(default_factory=list)
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


@dataclass
class SewingPattern:
    panels: list[Panel]
    stitches: list[Stitch] = field(default_factory=list)
    symmetry: SymmetrySpec = field(default_factory=SymmetrySpec)

    def __post_init__(self):
        names = [p.name for p in self.panels]
        if len(set(names)) != len(names):
            raise ValueError("duplicate panel names")
        for s in self.stitches:
            for pname, eidx in ((s.panel_a, s.edge_a), (s.panel_b, s.edge_b)):
                p = self.panel(pname)
                if not (0 <= eidx < len(p.edges)):
                    raise ValueError(f"stitch references missing edge {pname}/{eidx}")
            if (s.panel_a, s.edge_a) == (s.panel_b, s.edge_b):
                raise ValueError("stitch sides must be distinct edges")

    def panel(self, name: str) -> Panel:
        for p in self.panels:
            if p.name == name:
                return p
        raise KeyError(f"no panel named {name!r}")

    def panel_index(self, name: str) -> int:
        for i, p in enumerate(self.panels):
            if p.name == name:
                return i
        raise KeyError(name)

    @property
    def vertex_offsets(self) -> list[int]:
        """Start of each panel's vertices in the global concatenated order."""
        offs, n = [], 0
        for p in self.panels:
            offs.append(n)
            n += len(p.vertices)
        return offs

    def all_vertices(self) -> np.ndarray:
        """Global (n,2) stack of panel curve vertices, in panel file order."""
        return np.concatenate([p.vertices for p in self.panels], axis=0)

    def set_all_vertices(self, verts: np.ndarray) -> None:
        offs = self.vertex_offsets
        for p, o in zip(self.panels, offs):
            p.vertices = np.array(verts[o:o + len(p.vertices)])

    def all_controls(self) -> tuple[np.ndarray, list[tuple[int, int]]]:
        """Controls of curved edges as (m,2) plus their (panel, edge) keys."""
        ctrl, keys = [], []
        for pi, p in enumerate(self.panels):
            for ei, e in enumerate(p.edges):
                if e.control is not None:
                    ctrl.append(e.control)
                    keys.append((pi, ei))
        arr = np.array(ctrl, dtype=float).reshape(-1, 2)
        return arr, keys

    def set_all_controls(self, ctrl: np.ndarray, keys: list[tuple[int, int]]) -> None:
        for (pi, ei), c in zip(keys, ctrl):
            self.panels[pi].edges[ei].control = np.array(c)

    def component_map(self) -> dict[str, int]:
        """Panel -> connected component id, treating stitched panels as connected."""
        names = [p.name for p in self.panels]
        parent = {n: n for n in names}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s in self.stitches:
            ra, rb = find(s.panel_a), find(s.panel_b)
            if ra != rb:
                parent[ra] = rb
        roots = []
        out = {}
        for n in names:
            r = find(n)
            if r not in roots:
                roots.append(r)
            out[n] = roots.index(r)
        return out

    def copy(self) -> "SewingPattern":
        return load_pattern_dict(pattern_to_dict(self))


# ---------------------------------------------------------------------------
# Quadratic Bezier evaluation

def edge_points(pattern_or_panel, edge: BezierEdge) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(P0, K, P1) for an edge; straight edges get the chord midpoint as K."""
    verts = pattern_or_panel.vertices
    p0 = verts[edge.start]
    p1 = verts[edge.end]
    k = edge.control if edge.control is not None else 0.5 * (p0 + p1)
    return p0, k, p1


def bezier_eval(p0, k, p1, t):
    """Point(s) on the quadratic curve (1-t)^2 P0 + 2(1-t)t K + t^2 P1."""
    t = np.asarray(t)
    w0 = (1 - t) ** 2
    w1 = 2 * (1 - t) * t
    w2 = t ** 2
    return (w0[..., None] * np.asarray(p0) + w1[..., None] * np.asarray(k)
            + w2[..., None] * np.asarray(p1))


def bezier_tangent(p0, k, p1, t, normalized=False):
    """Derivative 2(1-t)(K-P0) + 2t(P1-K); optionally unit length."""
    t = np.asarray(t)
    d0 = np.asarray(k) - np.asarray(p0)
    d1 = np.asarray(p1) - np.asarray(k)
    tan = 2 * (1 - t)[..., None] * d0 + 2 * t[..., None] * d1
    if normalized:
        nrm = np.sqrt(np.sum(tan * tan, axis=-1))[..., None]
        if np.any(nrm.real < 1e-14):
            raise ValueError("zero tangent on degenerate edge")
        tan = tan / nrm
    return tan


def arc_length_table(p0, k, p1, subdiv: int = ARC_SUBDIV):
    """Cumulative chord lengths at subdiv+1 uniform t samples."""
    ts = np.linspace(0.0, 1.0, subdiv + 1)
    pts = bezier_eval(p0, k, p1, ts)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return ts, cum


def arc_length(p0, k, p1) -> float:
    return float(arc_length_table(p0, k, p1)[1][-1])


def arc_length_params(p0, k, p1, n_segments: int) -> np.ndarray:
    """Interior parameters splitting the curve into n_segments equal-length pieces."""
    if n_segments < 1:
        raise ValueError("n_segments must be >= 1")
    if n_segments == 1:
        return np.zeros(0)
    ts, cum = arc_length_table(p0, k, p1)
    total = cum[-1]
    targets = total * np.arange(1, n_segments) / n_segments
    return np.interp(targets, cum, ts)


def choose_sample_counts(pattern: SewingPattern, target_edge_length: float) -> dict[tuple[int, int], int]:
    """Points-per-edge map (endpoints included), stitched sides equalized.

    n_e = max(2, round(arclen/target)); each stitch takes the max of its
    two sides so seams pair vertex-to-vertex.
    """
    if target_edge_length <= 0:
        raise ValueError("target edge length must be > 0")
    counts: dict[tuple[int, int], int] = {}
    for pi, panel in enumerate(pattern.panels):
        for ei, e in enumerate(panel.edges):
            length = arc_length(*edge_points(panel, e))
            counts[(pi, ei)] = max(2, int(round(length / target_edge_length)))
    for s in pattern.stitches:
        ka = (pattern.panel_index(s.panel_a), s.edge_a)
        kb = (pattern.panel_index(s.panel_b), s.edge_b)
        n = max(counts[ka], counts[kb])
        counts[ka] = counts[kb] = n
    return counts


# ---------------------------------------------------------------------------
# Symmetrization

class Symmetrizer:
    """Validated curve vertices and controls under mirror constraints.

    Vertices minimize
        sum |(P_i - P_j) + R_S (P_k - P_l)|^2  +  eps * sum |P_i - P_i^in|^2,
    a fixed positive-definite linear system (the u and v coordinates
    decouple because R_S is diagonal).  Controls are symmetrized by
    averaging chord-frame relative coordinates with the flipped partner's.
    """

    def __init__(self, pattern: SewingPattern):
        self.spec = pattern.symmetry
        self.n = len(pattern.all_vertices())
        eps = self.spec.epsilon
        # Quadratic forms: A_u, A_v assembled from the pair terms.
        Au = np.zeros((self.n, self.n))
        Av = np.zeros((self.n, self.n))
        for (i, j, k, l) in self.spec.pairs:
            for idx in (i, j, k, l):
                if not (0 <= idx < self.n):
                    raise ValueError(f"symmetry pair index {idx} out of range")
            # u: (u_i - u_j - u_k + u_l)^2 ; v: (v_i - v_j + v_k - v_l)^2
            su = np.zeros(self.n)
            su[[i, j, k, l]] += [1.0, -1.0, -1.0, 1.0]
            sv = np.zeros(self.n)
            sv[[i, j, k, l]] += [1.0, -1.0, 1.0, -1.0]
            Au += np.outer(su, su)
            Av += np.outer(sv, sv)
        self._Mu = Au + eps * np.eye(self.n)
        self._Mv = Av + eps * np.eye(self.n)
        self._Mu_inv = np.linalg.inv(self._Mu)
        self._Mv_inv = np.linalg.inv(self._Mv)
        # Edge partners for control symmetrization: (panel,edge) -> pair info.
        self._edge_pairs = self._match_control_pairs(pattern)

    @staticmethod
    def _edge_lookup(pattern: SewingPattern) -> dict[tuple[int, int], tuple[int, int]]:
        """(global start, global end) -> (panel, edge)."""
        out = {}
        offs = pattern.vertex_offsets
        for pi, panel in enumerate(pattern.panels):
            for ei, e in enumerate(panel.edges):
                out[(offs[pi] + e.start, offs[pi] + e.end)] = (pi, ei)
        return out

    def _match_control_pairs(self, pattern):
        """For each symmetry pair, locate the two edges if they exist."""
        lut = self._edge_lookup(pattern)
        pairs = []
        for (i, j, k, l) in self.spec.pairs:
            ea = lut.get((i, j)) or lut.get((j, i))
            eb = lut.get((k, l)) or lut.get((l, k))
            if ea is None or eb is None:
                continue  # pure vertex constraint, no edge control to pair
            # Orient: QP couples direction i->j with mirrored l->k.
            fa = (i, j) in lut
            fb = (l, k) in lut
            pairs.append((ea, fa, eb, fb))
        return pairs

    def symmetrize_vertices(self, verts: np.ndarray) -> np.ndarray:
        eps = self.spec.epsilon
        out = np.empty_like(verts)
        out[:, 0] = self._Mu_inv @ (eps * verts[:, 0])
        out[:, 1] = self._Mv_inv @ (eps * verts[:, 1])
        return out

    def vertices_vjp(self, d_out: np.ndarray) -> np.ndarray:
        """Cotangent of symmetrize_vertices (self-adjoint up to the eps scale)."""
        eps = self.spec.epsilon
        d_in = np.empty_like(d_out)
        d_in[:, 0] = eps * (self._Mu_inv.T @ d_out[:, 0])
        d_in[:, 1] = eps * (self._Mv_inv.T @ d_out[:, 1])
        return d_in

    def residual(self, verts: np.ndarray) -> float:
        """Sum of squared pair violations (the QP data term)."""
        r = 0.0
        for (i, j, k, l) in self.spec.pairs:
            r += float(np.sum(((verts[i] - verts[j])
                               + FLIP_MATRIX @ (verts[k] - verts[l])) ** 2))
        return r

    # -- controls ----------------------------------------------------------

    @staticmethod
    def _chord_frame(p, q):
        """Frame matrix [c, perp(c)] with c = q - p; perp = rotate90(c)."""
        c = q - p
        return np.array([[c[0], -c[1]], [c[1], c[0]]]), 0.5 * (p + q)

    def apply(self, pattern: SewingPattern, verts: np.ndarray,
              controls: np.ndarray, ctrl_keys: list[tuple[int, int]]):
        """Return (validated vertices, validated controls).

        Controls of edges not in any symmetry pair pass through unchanged.
        """
        v_hat = self.symmetrize_vertices(verts)
        c_hat = np.array(controls)
        key_of = {k: idx for idx, k in enumerate(ctrl_keys)}
        offs = pattern.vertex_offsets

        def endpoint_idx(pe):
            pi, ei = pe
            e = pattern.panels[pi].edges[ei]
            return offs[pi] + e.start, offs[pi] + e.end

        for (ea, fa, eb, fb) in self._edge_pairs:
            ia = key_of.get(ea)
            ib = key_of.get(eb)
            if ia is None and ib is None:
                continue
            sa, ta = endpoint_idx(ea)
            sb, tb = endpoint_idx(eb)
            # Side a traversed i->j; side b traversed l->k (mirror direction).
            pa, qa = (v_hat[sa], v_hat[ta]) if fa else (v_hat[ta], v_hat[sa])
            pb, qb = (v_hat[sb], v_hat[tb]) if fb else (v_hat[tb], v_hat[sb])
            Ja, ma = self._chord_frame(pa, qa)
            Jb, mb = self._chord_frame(pb, qb)
            ka = controls[ia] if ia is not None else 0.5 * (pa + qa)
            kb = controls[ib] if ib is not None else 0.5 * (pb + qb)
            ra = np.linalg.solve(Ja, ka - ma)
            rb = np.linalg.solve(Jb, kb - mb)
            avg = 0.5 * np.array([ra[0] + rb[0], ra[1] - rb[1]])
            if ia is not None:
                c_hat[ia] = ma + Ja @ avg
            if ib is not None:
                c_hat[ib] = mb + Jb @ np.array([avg[0], -avg[1]])
        return v_hat, c_hat

    def apply_vjp(self, pattern: SewingPattern, verts: np.ndarray,
                  controls: np.ndarray, ctrl_keys: list[tuple[int, int]],
                  d_vhat: np.ndarray, d_chat: np.ndarray):
        """Back-propagate cotangents through apply().

        Uses complex-step directional derivatives of the (small) control map
        plus the transpose solve of the vertex QP.
        """
        d_vhat = np.asarray(d_vhat, dtype=float)
        d_chat = np.asarray(d_chat, dtype=float)
        nv, nc = verts.size, controls.size
        d_in_v = np.zeros_like(verts)
        d_in_c = np.zeros_like(controls)

        # d(v_hat)/d(verts) is the linear QP map; controls don't affect v_hat.
        d_in_v += self.vertices_vjp(d_vhat)

        if nc == 0 or not self._edge_pairs:
            d_in_c += d_chat
            return d_in_v, d_in_c

        # The control map is c_hat = F(v_hat(verts), controls).  Build its
        # Jacobian by complex-step on the modest number of inputs.
        def control_map(vh_flat, c_flat):
            vh = vh_flat.reshape(-1, 2)
            cc = c_flat.reshape(-1, 2)
            out = np.array(cc, dtype=vh_flat.dtype)
            key_of = {k: idx for idx, k in enumerate(ctrl_keys)}
            offs = pattern.vertex_offsets
            for (ea, fa, eb, fb) in self._edge_pairs:
                ia, ib = key_of.get(ea), key_of.get(eb)
                if ia is None and ib is None:
                    continue
                pia, eia = ea
                e_a = pattern.panels[pia].edges[eia]
                sa, ta = offs[pia] + e_a.start, offs[pia] + e_a.end
                pib, eib = eb
                e_b = pattern.panels[pib].edges[eib]
                sb, tb = offs[pib] + e_b.start, offs[pib] + e_b.end
                pa, qa = (vh[sa], vh[ta]) if fa else (vh[ta], vh[sa])
                pb, qb = (vh[sb], vh[tb]) if fb else (vh[tb], vh[sb])
                ca = qa - pa
                cb = qb - pb
                Ja = np.array([[ca[0], -ca[1]], [ca[1], ca[0]]])
                Jb = np.array([[cb[0], -cb[1]], [cb[1], cb[0]]])
                ma, mb = 0.5 * (pa + qa), 0.5 * (pb + qb)
                ka = cc[ia] if ia is not None else ma
                kb = cc[ib] if ib is not None else mb
                ra = np.linalg.solve(Ja, ka - ma)
                rb = np.linalg.solve(Jb, kb - mb)
                avg0 = 0.5 * (ra[0] + rb[0])
                avg1 = 0.5 * (ra[1] - rb[1])
                if ia is not None:
                    out[ia] = ma + Ja @ np.array([avg0, avg1])
                if ib is not None:
                    out[ib] = mb + Jb @ np.array([avg0, -avg1])
            return out.ravel()

        vh = self.symmetrize_vertices(verts)
        vh_flat = vh.ravel()
        c_flat = controls.ravel()
        h = 1e-200
        d_vh_acc = np.zeros(nv)
        for m in range(nv):
            z = vh_flat.astype(complex)
            z[m] += 1j * h
            col = control_map(z, c_flat.astype(complex)).imag / h
            d_vh_acc[m] = col @ d_chat.ravel()
        for m in range(nc):
            z = c_flat.astype(complex)
            z[m] += 1j * h
            col = control_map(vh_flat.astype(complex), z).imag / h
            d_in_c.ravel()[m] += col @ d_chat.ravel()
        # chain d/d(v_hat) through the QP transpose
        d_in_v += self.vertices_vjp(d_vh_acc.reshape(-1, 2))
        return d_in_v, d_in_c


def symmetrize(pattern: SewingPattern) -> SewingPattern:
    """Convenience wrapper: validated copy of the whole pattern."""
    sym = Symmetrizer(pattern)
    verts = pattern.all_vertices()
    controls, keys = pattern.all_controls()
    v_hat, c_hat = sym.apply(pattern, verts, controls, keys)
    out = pattern.copy()
    out.set_all_vertices(v_hat)
    out.set_all_controls(c_hat, keys)
    return out


# ---------------------------------------------------------------------------
# Pattern file format (JSON)

def pattern_to_dict(p: SewingPattern) -> dict:
    return {
        "panels": [
            {
                "name": panel.name,
                "vertices": panel.vertices.tolist(),
                "edges": [
                    {"start": e.start, "end": e.end,
                     "control": None if e.control is None else e.control.tolist()}
                    for e in panel.edges
                ],
                "placement": {
                    "rotation": panel.rotation.reshape(-1).tolist(),
                    "translation": panel.translation.tolist(),
                },
            }
            for panel in p.panels
        ],
        "stitches": [
            {"a": [s.panel_a, s.edge_a], "b": [s.panel_b, s.edge_b],
             "reversed": s.reversed}
            for s in p.stitches
        ],
        "symmetry": {
            "pairs": [[[i, j], [k, l]] for (i, j, k, l) in p.symmetry.pairs],
            "epsilon": p.symmetry.epsilon,
        },
    }


def load_pattern_dict(d: dict) -> SewingPattern:
    try:
        panels = []
        for pd in d["panels"]:
            edges = [BezierEdge(ed["start"], ed["end"],
                                None if ed.get("control") is None else np.array(ed["control"]))
                     for ed in pd["edges"]]
            place = pd.get("placement", {})
            panels.append(Panel(
                name=pd["name"],
                vertices=np.array(pd["vertices"], dtype=float),
                edges=edges,
                rotation=np.array(place.get("rotation", np.eye(3).ravel()),
                                  dtype=float).reshape(3, 3),
                translation=np.array(place.get("translation", [0, 0, 0]), dtype=float),
            ))
        stitches = [Stitch(s["a"][0], int(s["a"][1]), s["b"][0], int(s["b"][1]),
                           bool(s.get("reversed", False)))
                    for s in d.get("stitches", [])]
        sym = d.get("symmetry", {})
        pairs = [(int(a[0]), int(a[1]), int(b[0]), int(b[1]))
                 for a, b in sym.get("pairs", [])]
        spec = SymmetrySpec(pairs=pairs, epsilon=float(sym.get("epsilon", 1e-3)))
        return SewingPattern(panels=panels, stitches=stitches, symmetry=spec)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed pattern document: {exc!r}") from exc


def save_pattern(p: SewingPattern, path) -> None:
    with open(path, "w") as f:
        json.dump(pattern_to_dict(p), f, indent=2)


def load_pattern(path) -> SewingPattern:
    with open(path) as f:
        return load_pattern_dict(json.load(f))
