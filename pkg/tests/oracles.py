"""Independent reference implementations used to check the package.

Everything here is deliberately written by a different route than the
library code: split search enumerates every bipartition in exact rational
arithmetic, pruning re-runs the weakest-link recursion with Fractions,
logistic fitting uses damped Newton on the log-likelihood instead of
reweighted least squares, and the mixed-model deviance integrates each
group's likelihood by adaptive Gauss-Hermite quadrature.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

THRESHOLD_SCALES = ("numeric", "binary", "ordinal")


def _decrease(y, obs, left):
    """Exact Gini decrease, in count units over the observed rows."""
    m = len(obs)
    m1 = sum(y[i] for i in obs)
    m0 = m - m1
    l = len(left)
    l1 = sum(y[i] for i in left)
    r = m - l
    r1 = m1 - l1
    return 2 * (
        Fraction(m0 * m1, m)
        - Fraction(l1 * (l - l1), l)
        - Fraction(r1 * (r - r1), r)
    )


def brute_force_best_split(values, response, scale, levels=(), min_bucket=1):
    """Best bipartition of one variable by exhaustive enumeration.

    Returns (improvement, partitions): the largest per-root-row Gini
    improvement over all admissible bipartitions of the observed rows, and
    every left-row frozenset attaining it exactly.  (0.0, []) means no
    admissible bipartition improves.
    """
    n = len(values)
    y = [int(v) for v in response]
    obs = [i for i, v in enumerate(values) if v is not None]
    m = len(obs)
    if m < 2:
        return 0.0, []

    candidates = []
    if scale in THRESHOLD_SCALES:
        if scale == "ordinal":
            code = {level: j + 1 for j, level in enumerate(levels)}
            codes = {i: code[values[i]] for i in obs}
        else:
            codes = {i: float(values[i]) for i in obs}
        for cut in sorted(set(codes.values()))[:-1]:
            candidates.append(frozenset(i for i in obs if codes[i] <= cut))
    else:
        seen = sorted({values[i] for i in obs}, key=levels.index)
        if len(seen) < 2:
            return 0.0, []
        first, rest = seen[0], seen[1:]
        for size in range(len(rest)):
            for extra in itertools.combinations(rest, size):
                chosen = {first, *extra}
                candidates.append(
                    frozenset(i for i in obs if values[i] in chosen)
                )

    best = None
    partitions = []
    for left in candidates:
        if len(left) < min_bucket or m - len(left) < min_bucket:
            continue
        dec = _decrease(y, obs, left)
        if best is None or dec > best:
            best, partitions = dec, [left]
        elif dec == best:
            partitions.append(left)
    if best is None or best <= 0:
        return 0.0, []
    return float(Fraction(m, n) * best / n), partitions


def weakest_link_states(tree):
    """Reference pruning sequence by direct weakest-link recursion.

    Returns a list of states (alpha, n_splits, rel_error, alive_ids): alpha
    is the exact collapse value producing the state (None for the full
    tree), rel_error the training risk over root risk, and alive_ids the
    node_ids of the internal nodes still standing.  Root risk must be > 0.
    """
    nodes = {}

    def walk(node):
        nodes[node.node_id] = node
        if not node.is_leaf:
            walk(node.left)
            walk(node.right)

    walk(tree.root)
    root_risk = tree.root.risk
    if root_risk == 0:
        raise ValueError("pure root; sequence is degenerate")
    alive = {nid for nid, node in nodes.items() if not node.is_leaf}

    def branch(nid):
        node = nodes[nid]
        if node.is_leaf or nid not in alive:
            return node.risk, 1
        risk_l, leaves_l = branch(node.left.node_id)
        risk_r, leaves_r = branch(node.right.node_id)
        return risk_l + risk_r, leaves_l + leaves_r

    def state(alpha):
        risk, _ = branch(tree.root.node_id)
        return alpha, len(alive), Fraction(risk, root_risk), frozenset(alive)

    states = [state(None)]
    while alive:
        links = {}
        for nid in alive:
            risk, leaves = branch(nid)
            links[nid] = Fraction(nodes[nid].risk - risk, leaves - 1)
        g_min = min(links.values())

        def drop(nid):
            node = nodes[nid]
            if node.is_leaf:
                return
            alive.discard(nid)
            drop(node.left.node_id)
            drop(node.right.node_id)

        for nid in [nid for nid, g in links.items() if g == g_min]:
            drop(nid)
        states.append(state(g_min / root_risk))
    return states


def newton_logistic(X, y, tol=1e-12, max_iter=200):
    """Logistic maximum likelihood by damped Newton on the log-likelihood."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.zeros(X.shape[1])

    def nll(b):
        eta = X @ b
        return float(np.sum(np.logaddexp(0.0, eta)) - y @ eta)

    value = nll(beta)
    for _ in range(max_iter):
        eta = X @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        grad = X.T @ (mu - y)
        if np.max(np.abs(grad)) < tol:
            break
        w = mu * (1.0 - mu)
        hess = (X.T * w) @ X
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        scale = 1.0
        trial_value = None
        for _ in range(60):
            trial = beta - scale * step
            tv = nll(trial)
            if tv <= value + 1e-12:
                trial_value = tv
                break
            scale /= 2.0
        if trial_value is None:
            break
        beta = beta - scale * step
        value = trial_value
    return beta


def agq_deviance(X, y, groups, beta, sigma2, n_points=21):
    """Marginal deviance of a one-factor random-intercept logistic model.

    Each group's likelihood is integrated by Gauss-Hermite quadrature
    recentered and rescaled at the group's posterior mode (adaptive rule);
    sigma2 <= 0 degrades to the plain logistic deviance.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.asarray(beta, dtype=float)
    eta_fixed = X @ beta
    if sigma2 <= 0.0:
        mu = np.clip(1.0 / (1.0 + np.exp(-eta_fixed)), 1e-12, 1.0 - 1e-12)
        return float(-2.0 * np.sum(y * np.log(mu) + (1.0 - y) * np.log(1.0 - mu)))

    _, codes = np.unique(np.asarray(groups, dtype=str), return_inverse=True)
    nodes, weights = np.polynomial.hermite.hermgauss(n_points)
    total = 0.0
    for g in range(int(codes.max()) + 1):
        rows = codes == g
        offset = eta_fixed[rows]
        y_g = y[rows]

        def log_joint(u):
            eta = offset + u
            return float(
                np.sum(y_g * eta - np.logaddexp(0.0, eta))
                - u * u / (2.0 * sigma2)
                - 0.5 * math.log(2.0 * math.pi * sigma2)
            )

        u_hat = 0.0
        w_sum = float(len(y_g)) / 4.0
        for _ in range(200):
            mu = 1.0 / (1.0 + np.exp(-(offset + u_hat)))
            w_sum = float(np.sum(mu * (1.0 - mu)))
            score = float(np.sum(y_g - mu)) - u_hat / sigma2
            step = score / (w_sum + 1.0 / sigma2)
            u_hat += step
            if abs(step) < 1e-13:
                break
        tau = 1.0 / math.sqrt(w_sum + 1.0 / sigma2)
        shifted = [log_joint(u_hat + math.sqrt(2.0) * tau * t) for t in nodes]
        logs = np.log(weights) + nodes**2 + np.asarray(shifted)
        total += math.log(math.sqrt(2.0) * tau) + float(logsumexp(logs))
    return -2.0 * total


def mann_whitney_auc(truth, scores):
    """Concordance probability over all positive/negative pairs."""
    truth = np.asarray(truth)
    scores = np.asarray(scores, dtype=float)
    pos = scores[truth == 1]
    neg = scores[truth == 0]
    wins = 0.0
    for s in pos:
        wins += float(np.sum(s > neg)) + 0.5 * float(np.sum(s == neg))
    return wins / (pos.size * neg.size)
