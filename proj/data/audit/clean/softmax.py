import torch
import triton
import triton.language as tl


@triton.jit
def _softmax(x_ptr, out_ptr, stride, n_cols, BLOCK: tl.constexpr):
    row = tl.program_id(0)
    cols = tl.arange(0, BLOCK)
    mask = cols < n_cols
    x = tl.load(x_ptr + row * stride + cols, mask=mask, other=-float("inf"))
    x = x - tl.max(x, axis=0)
    num = tl.exp(x)
    tl.store(out_ptr + row * stride + cols, num / tl.sum(num, axis=0), mask=mask)


def custom_kernel(x):
    out = torch.empty_like(x)
    block = triton.next_power_of_2(x.shape[-1])
    _softmax[(x.shape[0],)](x, out, x.stride(0), x.shape[-1], BLOCK=block)
    return out
