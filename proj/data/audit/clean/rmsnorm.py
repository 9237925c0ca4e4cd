import torch
import triton
import triton.language as tl


@triton.jit
def _rmsnorm(x_ptr, g_ptr, out_ptr, stride, n_cols, eps, BLOCK: tl.constexpr):
    row = tl.program_id(0)
    cols = tl.arange(0, BLOCK)
    mask = cols < n_cols
    x = tl.load(x_ptr + row * stride + cols, mask=mask, other=0.0).to(tl.float32)
    ms = tl.sum(x * x, axis=0) / n_cols
    g = tl.load(g_ptr + cols, mask=mask)
    y = x * tl.rsqrt(ms + eps) * g
    tl.store(out_ptr + row * stride + cols, y, mask=mask)


def custom_kernel(x, gamma, eps=1e-6):
    out = torch.empty_like(x)
    block = triton.next_power_of_2(x.shape[-1])
    _rmsnorm[(x.shape[0],)](x, gamma, out, x.stride(0), x.shape[-1], eps, BLOCK=block)
    return out
