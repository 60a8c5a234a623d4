"""Dense transportation simplex with forbidden arcs and exact duals.

Maximizes sum_ij c[i,j] x[i,j] over the transportation polytope
{x >= 0, row sums = supplies, column sums = demands} with x[i,j] forced to
zero wherever allowed[i,j] is False.

Design notes:

* The basis is a spanning tree over sources, sinks and one artificial root
  node.  The initial tree is the all-artificial star (source->root and
  root->sink arcs carrying the marginals), so no phase-1 is needed.
* Artificial arcs price at -M with M symbolic: costs, potentials and reduced
  costs are (float, M-coefficient) pairs compared lexicographically, never a
  literal large float.  Mass left on an artificial arc at optimality is
  therefore an exact certificate that no admissible coupling exists.
* Entering and leaving arcs follow Bland's smallest-index rule over a fixed
  arc numbering (real arcs row-major, artificials after), which makes the
  solve deterministic and cycling-free.
* Reported dual potentials are rebuilt from the real basic arcs alone:
  within each connected component of the real basis they are pinned by
  complementary slackness, and per-component offsets are then raised by a
  longest-path relaxation until every allowed arc satisfies
  psi[j] - phi[i] >= c[i,j].  This keeps artificial M-parts out of the
  reported numbers and the duality gap at roundoff scale.
"""

from __future__ import annotations

import numpy as np

from .errors import NoCausalCoupling

_MASS_TOL = 1e-12
_PIVOT_TOL = 1e-12


def solve_max_transport(values, allowed, supplies, demands, max_pivots=200000):
    """Solve the maximization transportation problem.

    values: (n, m) array of arc gains; entries at disallowed arcs ignored.
    allowed: (n, m) boolean array of admissible arcs.
    supplies/demands: nonnegative vectors with equal sums.

    Returns (x, phi, psi) with x the optimal (n, m) mass matrix and duals
    satisfying psi[j] - phi[i] >= c[i,j] on allowed arcs, with equality on
    every basic (hence every support) arc.  Raises NoCausalCoupling when the
    allowed-arc structure cannot route the full mass.
    """
    c = np.asarray(values, dtype=float)
    ok = np.asarray(allowed, dtype=bool)
    a = [float(v) for v in supplies]
    b = [float(v) for v in demands]
    n, m = c.shape
    if ok.shape != (n, m) or len(a) != n or len(b) != m:
        raise ValueError("inconsistent problem dimensions")
    if abs(sum(a) - sum(b)) > 1e-9:
        raise ValueError("supplies and demands must balance")

    root = n + m
    n_nodes = n + m + 1
    n_real = n * m

    # arc key -> (tail, head, cost_float, cost_m)
    def arc_ends(k):
        if k < n_real:
            i, j = divmod(k, m)
            return i, n + j
        if k < n_real + n:
            return k - n_real, root
        return root, n + (k - n_real - n)

    def arc_cost(k):
        if k < n_real:
            i, j = divmod(k, m)
            return c[i, j], 0.0
        return 0.0, -1.0

    real_keys = [i * m + j for i in range(n) for j in range(m) if ok[i, j]]

    # flows
    x = [[0.0] * m for _ in range(n)]
    art_src = list(a)
    art_snk = list(b)

    def get_flow(k):
        if k < n_real:
            i, j = divmod(k, m)
            return x[i][j]
        if k < n_real + n:
            return art_src[k - n_real]
        return art_snk[k - n_real - n]

    def add_flow(k, d):
        if k < n_real:
            i, j = divmod(k, m)
            x[i][j] += d
        elif k < n_real + n:
            art_src[k - n_real] += d
        else:
            art_snk[k - n_real - n] += d

    basic = set(range(n_real, n_real + n + m))

    parent = [-1] * n_nodes
    parent_key = [-1] * n_nodes
    depth = [0] * n_nodes
    pi_f = [0.0] * n_nodes
    pi_m = [0.0] * n_nodes

    def rebuild_tree():
        adj = [[] for _ in range(n_nodes)]
        for k in basic:
            u, v = arc_ends(k)
            adj[u].append((v, k))
            adj[v].append((u, k))
        seen = [False] * n_nodes
        seen[root] = True
        parent[root] = -1
        parent_key[root] = -1
        depth[root] = 0
        pi_f[root] = 0.0
        pi_m[root] = 0.0
        stack = [root]
        count = 1
        while stack:
            u = stack.pop()
            for v, k in adj[u]:
                if seen[v]:
                    continue
                seen[v] = True
                count += 1
                parent[v] = u
                parent_key[v] = k
                depth[v] = depth[u] + 1
                _t, h = arc_ends(k)
                cf, cm = arc_cost(k)
                if h == v:  # arc oriented u -> v: pi_v = pi_u + cost
                    pi_f[v] = pi_f[u] + cf
                    pi_m[v] = pi_m[u] + cm
                else:  # arc oriented v -> u: pi_v = pi_u - cost
                    pi_f[v] = pi_f[u] - cf
                    pi_m[v] = pi_m[u] - cm
                stack.append(v)
        if count != n_nodes:
            raise AssertionError("basis is not a spanning tree")

    rebuild_tree()

    for _ in range(max_pivots):
        entering = -1
        for k in real_keys:
            if k in basic:
                continue
            i, j = divmod(k, m)
            rm = 0.0 - (pi_m[n + j] - pi_m[i])
            if rm > 0.5:
                entering = k
                break
            if rm < -0.5:
                continue
            if c[i, j] - (pi_f[n + j] - pi_f[i]) > _PIVOT_TOL:
                entering = k
                break
        if entering < 0:
            break

        tail, head = arc_ends(entering)
        # tree cycle: entering tail->head plus tree path head -> ... -> tail.
        # Collect (key, increases) along the path by climbing both endpoints
        # to their common ancestor.
        path = []  # (key, increases)
        u, v = tail, head
        while depth[u] > depth[v]:
            k = parent_key[u]
            t, _h = arc_ends(k)
            # cycle travels parent->u on the tail side
            path.append((k, t != u))
            u = parent[u]
        while depth[v] > depth[u]:
            k = parent_key[v]
            t, _h = arc_ends(k)
            # cycle travels v->parent on the head side
            path.append((k, t == v))
            v = parent[v]
        while u != v:
            k = parent_key[u]
            t, _h = arc_ends(k)
            path.append((k, t != u))
            u = parent[u]
            k = parent_key[v]
            t, _h = arc_ends(k)
            path.append((k, t == v))
            v = parent[v]

        theta = None
        leaving = -1
        for k, inc in path:
            if inc:
                continue
            f = get_flow(k)
            if theta is None or f < theta or (f == theta and k < leaving):
                theta = f
                leaving = k
        if leaving < 0:
            raise AssertionError("transportation cycle without reverse arc")

        if theta > 0.0:
            add_flow(entering, theta)
            for k, inc in path:
                add_flow(k, theta if inc else -theta)
        basic.remove(leaving)
        basic.add(entering)
        rebuild_tree()
    else:
        raise RuntimeError("pivot limit exceeded; this indicates a solver bug")

    stranded = max(
        sum(f for f in art_src if f > _MASS_TOL),
        sum(f for f in art_snk if f > _MASS_TOL),
    )
    if stranded > _MASS_TOL:
        raise NoCausalCoupling(
            f"no admissible coupling: {stranded:.3e} mass cannot be routed"
        )

    masses = np.array(x, dtype=float)
    masses[masses < 0.0] = 0.0
    masses[~ok] = 0.0

    phi, psi = _rebuild_duals(c, ok, basic, n, m)
    return masses, phi, psi


def _rebuild_duals(c, ok, basic, n, m):
    """Clean dual potentials from the real part of the optimal basis."""
    n_real = n * m
    adj = [[] for _ in range(n + m)]  # sources 0..n-1, sinks n..n+m-1
    for k in basic:
        if k >= n_real:
            continue
        i, j = divmod(k, m)
        adj[i].append(n + j)
        adj[n + j].append(i)

    comp = [-1] * (n + m)
    base = [0.0] * (n + m)  # potential before component offsets
    n_comp = 0
    for start in range(n + m):
        if comp[start] >= 0:
            continue
        comp[start] = n_comp
        base[start] = 0.0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if comp[v] >= 0:
                    continue
                comp[v] = n_comp
                if u < n:  # u source, v sink: psi_v = phi_u + c
                    base[v] = base[u] + c[u, v - n]
                else:  # u sink, v source: phi_v = psi_u - c
                    base[v] = base[u] - c[v, u - n]
                stack.append(v)
        n_comp += 1

    # Component offsets: delta[B] - delta[A] >= c_ij - (psi_j - phi_i) for
    # every allowed cross-component arc.  Longest-path relaxation; converges
    # because an improving cycle would contradict primal optimality.
    edges = []
    for i in range(n):
        for j in range(m):
            if not ok[i, j]:
                continue
            ca, cb = comp[i], comp[n + j]
            if ca == cb:
                continue
            edges.append((ca, cb, c[i, j] - (base[n + j] - base[i])))
    delta = [0.0] * n_comp
    for _ in range(n_comp + 1):
        changed = False
        for ca, cb, w in edges:
            need = delta[ca] + w
            if need > delta[cb] + 1e-13:
                delta[cb] = need
                changed = True
        if not changed:
            break
    else:
        if changed:
            raise AssertionError("dual offsets failed to stabilize")

    phi = np.array([base[i] + delta[comp[i]] for i in range(n)])
    psi = np.array([base[n + j] + delta[comp[n + j]] for j in range(m)])
    return phi, psi
