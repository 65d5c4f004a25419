"""Built-in sewing-pattern templates.

All templates use meters, y-up world placement around a torso-like body
centered on the y axis.  Panel loops are counterclockwise; symmetry pairs
follow the convention ((i, j), (phi(j), phi(i))) for a mirror vertex map
phi, so exactly mirror-symmetric inputs are fixed points of the QP.
"""

from __future__ import annotations

import numpy as np

from .pattern import BezierEdge, Panel, SewingPattern, Stitch, SymmetrySpec

ROT_Y_PI = np.array([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])


def _rect_panel(name, w, h, rotation, translation, hem_control=None):
    verts = np.array([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])
    edges = [
        BezierEdge(0, 1, None if hem_control is None else np.array(hem_control)),
        BezierEdge(1, 2),
        BezierEdge(2, 3),
        BezierEdge(3, 0),
    ]
    return Panel(name, verts, edges, rotation, translation)


def _self_mirror_pairs(offset, phi, edges):
    """Pairs ((i,j),(phi(j),phi(i))) for each loop edge, global indices."""
    out = []
    for (i, j) in edges:
        out.append((offset + i, offset + j, offset + phi[j], offset + phi[i]))
    return out


def rectangle_skirt(width=0.5, height=0.6, waist_y=0.55, stand_off=0.16):
    """Two rectangular panels sewn into a tube; waist is the top edge."""
    front = _rect_panel("front", width, height, np.eye(3),
                        [-width / 2, waist_y - height, stand_off])
    back = _rect_panel("back", width, height, ROT_Y_PI,
                       [width / 2, waist_y - height, -stand_off])
    stitches = [
        Stitch("front", 1, "back", 3, reversed=True),
        Stitch("front", 3, "back", 1, reversed=True),
    ]
    phi = {0: 1, 1: 0, 2: 3, 3: 2}
    pairs = (_self_mirror_pairs(0, phi, [(0, 1), (1, 2), (2, 3)])
             + _self_mirror_pairs(4, phi, [(0, 1), (1, 2), (2, 3)]))
    return SewingPattern([front, back], stitches, SymmetrySpec(pairs))


def a_line_skirt(hem_width=0.7, waist_width=0.5, height=0.6, flare=0.06,
                 waist_y=0.55, stand_off=0.16):
    """Trapezoid panels with a curved hem."""
    s = (hem_width - waist_width) / 2

    def make(name, rotation, translation):
        verts = np.array([[0.0, 0.0], [hem_width, 0.0],
                          [hem_width - s, height], [s, height]])
        edges = [
            BezierEdge(0, 1, np.array([hem_width / 2, -flare])),
            BezierEdge(1, 2),
            BezierEdge(2, 3),
            BezierEdge(3, 0),
        ]
        return Panel(name, verts, edges, rotation, translation)

    front = make("front", np.eye(3), [-hem_width / 2, waist_y - height, stand_off])
    back = make("back", ROT_Y_PI, [hem_width / 2, waist_y - height, -stand_off])
    stitches = [
        Stitch("front", 1, "back", 3, reversed=True),
        Stitch("front", 3, "back", 1, reversed=True),
    ]
    phi = {0: 1, 1: 0, 2: 3, 3: 2}
    pairs = (_self_mirror_pairs(0, phi, [(0, 1), (1, 2), (2, 3)])
             + _self_mirror_pairs(4, phi, [(0, 1), (1, 2), (2, 3)]))
    return SewingPattern([front, back], stitches, SymmetrySpec(pairs))


def _bodice_panel(name, w, h, underarm_h, shoulder_w, neck_w, neck_depth,
                  rotation, translation):
    """Bodice with concave armholes and a concave neckline."""
    verts = np.array([
        [0.0, 0.0],                 # 0 hem left
        [w, 0.0],                   # 1 hem right
        [w, underarm_h],            # 2 underarm right
        [w - shoulder_w, h],        # 3 shoulder right
        [w / 2 + neck_w, h],        # 4 neck right
        [w / 2 - neck_w, h],        # 5 neck left
        [shoulder_w, h],            # 6 shoulder left
        [0.0, underarm_h],          # 7 underarm left
    ])
    armhole_r = 0.5 * (verts[2] + verts[3]) + np.array([-0.03, -0.02])
    armhole_l = 0.5 * (verts[6] + verts[7]) + np.array([0.03, -0.02])
    edges = [
        BezierEdge(0, 1),
        BezierEdge(1, 2),
        BezierEdge(2, 3, armhole_r),
        BezierEdge(3, 4),
        BezierEdge(4, 5, np.array([w / 2, h - neck_depth])),
        BezierEdge(5, 6),
        BezierEdge(6, 7, armhole_l),
        BezierEdge(7, 0),
    ]
    return Panel(name, verts, edges, rotation, translation)


def tshirt(width=0.46, height=0.55, underarm_h=0.38, shoulder_w=0.1,
           neck_w=0.07, sleeve_w=0.24, sleeve_l=0.2, waist_y=0.35,
           stand_off=0.15):
    """Front/back bodice plus two sleeve panels."""
    front = _bodice_panel("front", width, height, underarm_h, shoulder_w,
                          neck_w, 0.08, np.eye(3),
                          [-width / 2, waist_y, stand_off])
    back = _bodice_panel("back", width, height, underarm_h, shoulder_w,
                         neck_w, 0.03, ROT_Y_PI,
                         [width / 2, waist_y, -stand_off])

    def sleeve(name, xoff):
        verts = np.array([[0.0, 0.0], [sleeve_w, 0.0],
                          [sleeve_w, sleeve_l], [0.0, sleeve_l]])
        edges = [BezierEdge(0, 1), BezierEdge(1, 2), BezierEdge(2, 3),
                 BezierEdge(3, 0)]
        # panel u runs along world z, v along world y
        rot = np.array([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        return Panel(name, verts, edges, rot,
                     [xoff, waist_y + underarm_h - sleeve_l, -sleeve_w / 2])

    sl = sleeve("sleeve_l", -(width / 2 + 0.12))
    sr = sleeve("sleeve_r", width / 2 + 0.12)
    stitches = [
        Stitch("front", 1, "back", 7, reversed=True),   # right side seam
        Stitch("front", 7, "back", 1, reversed=True),   # left side seam
        Stitch("front", 3, "back", 5, reversed=True),   # right shoulder
        Stitch("front", 5, "back", 3, reversed=True),   # left shoulder
        Stitch("front", 2, "sleeve_r", 1, reversed=False),
        Stitch("back", 6, "sleeve_r", 3, reversed=False),
        Stitch("front", 6, "sleeve_l", 3, reversed=False),
        Stitch("back", 2, "sleeve_l", 1, reversed=False),
    ]
    phi = {0: 1, 1: 0, 2: 7, 7: 2, 3: 6, 6: 3, 4: 5, 5: 4}
    body_edges = [(0, 1), (1, 2), (2, 3), (3, 4), (7, 0)]
    phi_s = {0: 1, 1: 0, 2: 3, 3: 2}
    pairs = (_self_mirror_pairs(0, phi, body_edges)
             + _self_mirror_pairs(8, phi, body_edges)
             + _self_mirror_pairs(16, phi_s, [(0, 1), (1, 2)])
             + _self_mirror_pairs(20, phi_s, [(0, 1), (1, 2)]))
    return SewingPattern([front, back, sl, sr], stitches, SymmetrySpec(pairs))


def _mirror_panel(panel: Panel, name, rotation, translation) -> Panel:
    """Mirror a panel about its u midline, keeping CCW orientation.

    Vertex indices are preserved; edge k of the mirror corresponds to edge
    n-1-k of the original.
    """
    a = 0.5 * (panel.vertices[:, 0].min() + panel.vertices[:, 0].max())
    verts = panel.vertices.copy()
    verts[:, 0] = 2 * a - verts[:, 0]
    edges = [BezierEdge(e.end, e.start,
                        None if e.control is None else
                        np.array([2 * a - e.control[0], e.control[1]]))
             for e in reversed(panel.edges)]
    return Panel(name, verts, edges, rotation, translation)


def pants(leg_width=0.22, crotch_ext=0.05, length=0.9, rise=0.25,
          waist_y=0.55, stand_off=0.12):
    """Four leg panels with concave crotch curves.

    Base panel (crotch on the +u side), edges:
      0 hem, 1 inseam, 2 crotch curve, 3 waist, 4 outer side.
    Mirrored panels have edge k at index 4-k.
    """
    w, ext, h = leg_width, crotch_ext, length
    verts = np.array([
        [0.0, 0.0],        # 0 hem outer
        [w, 0.0],          # 1 hem inner
        [w, h - rise],     # 2 crotch base
        [w + ext, h],      # 3 waist inner
        [0.0, h],          # 4 waist outer
    ])
    crotch_k = np.array([w - 0.01, h - rise / 3])
    edges = [BezierEdge(0, 1), BezierEdge(1, 2), BezierEdge(2, 3, crotch_k),
             BezierEdge(3, 4), BezierEdge(4, 0)]
    base = Panel("base", verts, edges)

    y0 = waist_y - h
    fl = Panel("front_l", base.vertices.copy(),
               [BezierEdge(e.start, e.end, None if e.control is None else e.control.copy())
                for e in base.edges],
               np.eye(3), [-(w + ext), y0, stand_off])
    fr = _mirror_panel(base, "front_r", np.eye(3), [0.0, y0, stand_off])
    bl = _mirror_panel(base, "back_l", ROT_Y_PI, [0.0, y0, -stand_off])
    br = Panel("back_r", base.vertices.copy(),
               [BezierEdge(e.start, e.end, None if e.control is None else e.control.copy())
                for e in base.edges],
               ROT_Y_PI, [w + ext, y0, -stand_off])

    stitches = [
        Stitch("front_l", 4, "back_l", 0, reversed=True),   # left outer seam
        Stitch("front_r", 0, "back_r", 4, reversed=True),   # right outer seam
        Stitch("front_l", 1, "back_l", 3, reversed=True),   # left inseam
        Stitch("front_r", 3, "back_r", 1, reversed=True),   # right inseam
        Stitch("front_l", 2, "front_r", 2, reversed=True),  # center front
        Stitch("back_l", 2, "back_r", 2, reversed=True),    # center back
    ]

    def cross_pairs(off_a, off_b):
        # mirrored construction keeps vertex index correspondence
        return [(off_a + i, off_a + j, off_b + j, off_b + i)
                for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]]

    pairs = cross_pairs(0, 5) + cross_pairs(15, 10)
    return SewingPattern([fl, fr, bl, br], stitches, SymmetrySpec(pairs))


TEMPLATES = {
    "rectangle_skirt": rectangle_skirt,
    "a_line_skirt": a_line_skirt,
    "tshirt": tshirt,
    "pants": pants,
}


def make_template(name: str, **kwargs) -> SewingPattern:
    if name not in TEMPLATES:
        raise KeyError(f"unknown template {name!r}; have {sorted(TEMPLATES)}")
    return TEMPLATES[name](**kwargs)


def scale_panel_widths(pattern: SewingPattern, factor: float) -> SewingPattern:
    """Scale every panel's u extent about its own u centroid."""
    out = pattern.copy()
    for panel in out.panels:
        c = panel.vertices[:, 0].mean()
        panel.vertices[:, 0] = c + factor * (panel.vertices[:, 0] - c)
        for e in panel.edges:
            if e.control is not None:
                e.control[0] = c + factor * (e.control[0] - c)
    return out
