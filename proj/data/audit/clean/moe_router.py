import torch


def custom_kernel(hidden, router_weight, top_k=2):
    logits = hidden @ router_weight
    probs = torch.softmax(logits, dim=-1, dtype=torch.float32)
    weights, experts = torch.topk(probs, top_k, dim=-1)
    weights = weights / weights.sum(dim=-1, keepdim=True)
    return weights.to(hidden.dtype), experts
