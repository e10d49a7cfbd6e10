"""Central-difference validation of analytic gradients (double precision)."""
from __future__ import annotations

from dataclasses import dataclass

import torch

from .loop import forward_model
from .loss import horizon_loss

MAX_PARAMS = 5000


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    n_params: int
    per_param: dict[str, float]


def grad_check(model: torch.nn.Module, batch: dict[str, torch.Tensor],
               horizons: torch.Tensor, step: float = 1e-5) -> GradCheckReport:
    """Compare autograd gradients of the horizon loss against central finite
    differences, parameter by parameter.

    The model, inputs, and horizons must be double precision. The relative
    error denominator is floored at 1 % of the largest gradient magnitude so
    near-zero components do not blow up the ratio.
    """
    n_params = sum(p.numel() for p in model.parameters())
    if n_params > MAX_PARAMS:
        raise ValueError(f"model has {n_params} parameters; gradcheck allows {MAX_PARAMS}")
    for p in model.parameters():
        if p.dtype != torch.float64:
            raise ValueError("grad_check requires a double-precision model")

    def closure() -> torch.Tensor:
        pred = forward_model(model, batch)
        return horizon_loss(batch["gt"], pred, horizons)

    model.zero_grad()
    closure().backward()
    analytic = {name: p.grad.detach().clone()
                for name, p in model.named_parameters()}

    g_scale = max(g.abs().max().item() for g in analytic.values())
    floor = max(1e-2 * g_scale, 1e-12)

    per_param: dict[str, float] = {}
    worst = ("", 0.0)
    with torch.no_grad():
        for name, p in model.named_parameters():
            flat = p.view(-1)
            num = torch.zeros_like(flat)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + step
                f_plus = closure().item()
                flat[i] = orig - step
                f_minus = closure().item()
                flat[i] = orig
                num[i] = (f_plus - f_minus) / (2.0 * step)
            a = analytic[name].view(-1)
            denom = torch.maximum(torch.maximum(a.abs(), num.abs()),
                                  torch.full_like(num, floor))
            rel = ((a - num).abs() / denom).max().item()
            per_param[name] = rel
            if rel > worst[1]:
                worst = (name, rel)
    return GradCheckReport(max_rel_error=worst[1], worst_param=worst[0],
                           n_params=n_params, per_param=per_param)
