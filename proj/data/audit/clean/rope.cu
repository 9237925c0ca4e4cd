#include <cuda_runtime.h>

// Rotary embedding over the last dimension, fp32 in and out.
__global__ void rope_kernel(float* q, const float* cos_t, const float* sin_t,
                            int tokens, int heads, int dim) {
  int t = blockIdx.x;
  int h = blockIdx.y;
  int half_dim = dim / 2;
  for (int d = threadIdx.x; d < half_dim; d += blockDim.x) {
    float* row = q + (static_cast<long>(t) * heads + h) * dim;
    float a = row[d];
    float b = row[d + half_dim];
    float c = cos_t[t * half_dim + d];
    float s = sin_t[t * half_dim + d];
    row[d] = a * c - b * s;
    row[d + half_dim] = a * s + b * c;
  }
}
