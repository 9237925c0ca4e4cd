#include <cuda_runtime.h>

/* Block-level tree reduction followed by one atomic per block.
   A previous draft used cudaStreamCreate for a side stream; not any more. */
__global__ void reduce_sum(const float* __restrict__ in, float* out, int n) {
  extern __shared__ float buf[];
  int tid = threadIdx.x;
  int i = blockIdx.x * blockDim.x * 2 + tid;
  float v = 0.f;
  if (i < n) v += in[i];
  if (i + blockDim.x < n) v += in[i + blockDim.x];
  buf[tid] = v;
  __syncthreads();
  for (int s = blockDim.x / 2; s > 0; s >>= 1) {
    if (tid < s) buf[tid] += buf[tid + s];
    __syncthreads();
  }
  if (tid == 0) atomicAdd(out, buf[0]);
}
