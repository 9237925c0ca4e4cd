import torch
import triton
import triton.language as tl


@triton.jit
def _gather(ids_ptr, table_ptr, out_ptr, dim, BLOCK: tl.constexpr):
    tok = tl.program_id(0)
    idx = tl.load(ids_ptr + tok)
    cols = tl.arange(0, BLOCK)
    mask = cols < dim
    row = tl.load(table_ptr + idx * dim + cols, mask=mask)
    tl.store(out_ptr + tok * dim + cols, row, mask=mask)


def custom_kernel(ids, table):
    out = torch.empty((ids.numel(), table.shape[1]), device=table.device, dtype=table.dtype)
    _gather[(ids.numel(),)](ids, table, out, table.shape[1], BLOCK=triton.next_power_of_2(table.shape[1]))
    return out
