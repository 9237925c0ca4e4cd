import torch


def custom_kernel(x, weight, bias, eps=1e-5):
    # Older version used a background thread here:
    #     threading.Thread(target=_prefetch).start()
    # it was removed before submission.
    mean = x.mean(dim=-1, keepdim=True)
    var = (x - mean).pow(2).mean(dim=-1, keepdim=True)
    return (x - mean) * torch.rsqrt(var + eps) * weight + bias
