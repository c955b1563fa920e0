"""Slow reference implementations used as test oracles."""
import numpy as np

from passcast import mlp

GRAD_DENOM_FLOOR = 1e-6


def numeric_grad_rel_error(model, x, onehot, h=1e-5, max_coords=None, rng=None):
    """Largest relative error between backprop and central differences.

    Relative error is |a - n| / max(|a|, |n|, GRAD_DENOM_FLOOR); the floor keeps
    parameters whose true gradient is numerically zero from dominating.
    """
    exact = mlp.backward(model, x, onehot)
    worst = 0.0
    for params, grads in ((model.weights, exact.weights), (model.biases, exact.biases)):
        for P, G in zip(params, grads):
            flat, gflat = P.reshape(-1), G.reshape(-1)
            coords = np.arange(flat.size)
            if max_coords is not None and flat.size > max_coords:
                coords = rng.choice(flat.size, max_coords, replace=False)
            for k in coords:
                old = flat[k]
                flat[k] = old + h
                up = mlp.loss(mlp.forward(model, x), onehot)
                flat[k] = old - h
                down = mlp.loss(mlp.forward(model, x), onehot)
                flat[k] = old
                num = (up - down) / (2 * h)
                a = gflat[k]
                err = abs(a - num) / max(abs(a), abs(num), GRAD_DENOM_FLOOR)
                worst = max(worst, err)
    return worst


def greedy_oracle(threats, teammates, pairs, threat_floor=0.0):
    """Step-by-step restatement of the assignment loop over explicit candidate lists.

    Returns [(teammate, opponent, task_name, pair_score)] in assignment order.
    """
    free_t = set(teammates)
    free_o = {t.unum: t.final for t in threats}
    out = []
    while free_t and free_o:
        top = max(free_o.values())
        if top <= threat_floor:
            break
        o = min(u for u, v in free_o.items() if v == top)
        best = max(max(pairs[(t, o)]) for t in free_t)
        t = min(t for t in free_t if max(pairs[(t, o)]) == best)
        mark, block = pairs[(t, o)]
        task = "mark" if mark == best else "block"
        out.append((t, o, task, best))
        free_t.discard(t)
        del free_o[o]
    return out
