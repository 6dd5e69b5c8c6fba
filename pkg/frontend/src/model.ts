/**
 * Small convolutional classifier with hand-rolled backprop.
 *
 * Two conv/relu/maxpool blocks feed a fully connected softmax head.
 * Float64 math throughout so analytic gradients can be checked against
 * central finite differences at tight tolerance.
 */

import { gaussian, mulberry32, type Rng } from "./rng.js";
import type { Raster } from "./image.js";

export interface ParamTensor {
  name: string;
  value: Float64Array;
  grad: Float64Array;
  velocity: Float64Array;
}

function makeParam(name: string, size: number, init: (i: number) => number): ParamTensor {
  const value = new Float64Array(size);
  for (let i = 0; i < size; i++) value[i] = init(i);
  return {
    name,
    value,
    grad: new Float64Array(size),
    velocity: new Float64Array(size),
  };
}

/** Numerically stable softmax. */
export function softmax(logits: Float64Array): Float64Array {
  let max = -Infinity;
  for (const v of logits) max = Math.max(max, v);
  const out = new Float64Array(logits.length);
  let sum = 0;
  for (let i = 0; i < logits.length; i++) {
    out[i] = Math.exp(logits[i] - max);
    sum += out[i];
  }
  for (let i = 0; i < logits.length; i++) out[i] /= sum;
  return out;
}

/** Cross-entropy of a softmax distribution against a one-hot target. */
export function crossEntropy(probs: Float64Array, label: number): number {
  return -Math.log(Math.max(probs[label], 1e-12));
}

interface BlockCache {
  input: Float64Array;
  preAct: Float64Array;
  pooledArg: Int32Array;
}

interface ForwardCache {
  blocks: BlockCache[];
  flat: Float64Array;
  logits: Float64Array;
}

export class SmallConvNet {
  readonly inputSize: number;
  readonly numClasses: number;
  readonly channels: number[];
  readonly params: ParamTensor[] = [];
  private readonly convs: ParamTensor[][] = [];
  private fcW: ParamTensor;
  private fcB: ParamTensor;

  constructor(inputSize: number, numClasses: number, seed: number, channels = [8, 16]) {
    if (inputSize % 2 ** channels.length !== 0) {
      throw new Error(`input size ${inputSize} not divisible by pooling factor`);
    }
    this.inputSize = inputSize;
    this.numClasses = numClasses;
    this.channels = channels;
    const rng = mulberry32(seed);

    let cin = 3;
    for (let b = 0; b < channels.length; b++) {
      const cout = channels[b];
      const fanIn = cin * 9;
      const std = Math.sqrt(2 / fanIn);
      const w = makeParam(`conv${b}.w`, cout * cin * 9, () => gaussian(rng) * std);
      const bias = makeParam(`conv${b}.b`, cout, () => 0);
      this.convs.push([w, bias]);
      this.params.push(w, bias);
      cin = cout;
    }
    const side = inputSize / 2 ** channels.length;
    const flatDim = cin * side * side;
    const std = Math.sqrt(2 / flatDim);
    this.fcW = makeParam("fc.w", numClasses * flatDim, () => gaussian(rng) * std);
    this.fcB = makeParam("fc.b", numClasses, () => 0);
    this.params.push(this.fcW, this.fcB);
  }

  /** HWC [0,1] raster to the CHW float64 layout the net consumes. */
  toInput(raster: Raster): Float64Array {
    const s = this.inputSize;
    if (raster.width !== s || raster.height !== s) {
      throw new Error(`expected ${s}x${s} input, got ${raster.width}x${raster.height}`);
    }
    const out = new Float64Array(3 * s * s);
    for (let y = 0; y < s; y++) {
      for (let x = 0; x < s; x++) {
        for (let c = 0; c < 3; c++) {
          out[(c * s + y) * s + x] = raster.data[(y * s + x) * 3 + c];
        }
      }
    }
    return out;
  }

  forward(input: Float64Array): ForwardCache {
    const blocks: BlockCache[] = [];
    let act = input;
    let cin = 3;
    let side = this.inputSize;
    for (let b = 0; b < this.convs.length; b++) {
      const cout = this.channels[b];
      const [w, bias] = this.convs[b];
      const pre = conv3x3Forward(act, cin, side, w.value, bias.value, cout);
      for (let i = 0; i < pre.length; i++) if (pre[i] < 0) pre[i] = 0;
      const half = side / 2;
      const pooledArg = new Int32Array(cout * half * half);
      const pooled = maxPool2(pre, cout, side, pooledArg);
      blocks.push({ input: act, preAct: pre, pooledArg });
      act = pooled;
      cin = cout;
      side = half;
    }
    const logits = new Float64Array(this.numClasses);
    const wv = this.fcW.value;
    const dim = act.length;
    for (let j = 0; j < this.numClasses; j++) {
      let sum = this.fcB.value[j];
      const off = j * dim;
      for (let d = 0; d < dim; d++) sum += wv[off + d] * act[d];
      logits[j] = sum;
    }
    return { blocks, flat: act, logits };
  }

  predict(input: Float64Array): number {
    const { logits } = this.forward(input);
    let best = 0;
    for (let j = 1; j < logits.length; j++) if (logits[j] > logits[best]) best = j;
    return best;
  }

  zeroGrad(): void {
    for (const p of this.params) p.grad.fill(0);
  }

  /** Accumulate gradients for one sample; returns its loss and hit flag. */
  backward(input: Float64Array, label: number): { loss: number; correct: boolean } {
    const cache = this.forward(input);
    const probs = softmax(cache.logits);
    const loss = crossEntropy(probs, label);
    let best = 0;
    for (let j = 1; j < probs.length; j++) if (probs[j] > probs[best]) best = j;

    const dLogits = Float64Array.from(probs);
    dLogits[label] -= 1;

    const dim = cache.flat.length;
    const dFlat = new Float64Array(dim);
    for (let j = 0; j < this.numClasses; j++) {
      const off = j * dim;
      const dj = dLogits[j];
      this.fcB.grad[j] += dj;
      for (let d = 0; d < dim; d++) {
        this.fcW.grad[off + d] += dj * cache.flat[d];
        dFlat[d] += this.fcW.value[off + d] * dj;
      }
    }

    let dAct: Float64Array = dFlat;
    for (let b = this.convs.length - 1; b >= 0; b--) {
      const block = cache.blocks[b];
      const cout = this.channels[b];
      const cin = b === 0 ? 3 : this.channels[b - 1];
      const side = this.inputSize / 2 ** b;
      const dPre = maxPool2Backward(dAct, cout, side, block.pooledArg);
      for (let i = 0; i < dPre.length; i++) if (block.preAct[i] <= 0) dPre[i] = 0;
      const [w, bias] = this.convs[b];
      dAct = conv3x3Backward(
        block.input,
        cin,
        side,
        w.value,
        cout,
        dPre,
        w.grad,
        bias.grad,
      );
    }
    return { loss, correct: best === label };
  }

  /** SGD update with momentum and classic L2 weight decay. */
  step(lr: number, momentum: number, weightDecay: number, batchSize: number): void {
    for (const p of this.params) {
      const applyDecay = p.name.endsWith(".w");
      for (let i = 0; i < p.value.length; i++) {
        let g = p.grad[i] / batchSize;
        if (applyDecay) g += weightDecay * p.value[i];
        p.velocity[i] = momentum * p.velocity[i] - lr * g;
        p.value[i] += p.velocity[i];
      }
    }
  }
}

function conv3x3Forward(
  input: Float64Array,
  cin: number,
  side: number,
  weight: Float64Array,
  bias: Float64Array,
  cout: number,
): Float64Array {
  const out = new Float64Array(cout * side * side);
  for (let co = 0; co < cout; co++) {
    const wBase = co * cin * 9;
    for (let y = 0; y < side; y++) {
      for (let x = 0; x < side; x++) {
        let sum = bias[co];
        for (let ci = 0; ci < cin; ci++) {
          const wOff = wBase + ci * 9;
          const inBase = ci * side * side;
          for (let ky = -1; ky <= 1; ky++) {
            const yy = y + ky;
            if (yy < 0 || yy >= side) continue;
            for (let kx = -1; kx <= 1; kx++) {
              const xx = x + kx;
              if (xx < 0 || xx >= side) continue;
              sum += weight[wOff + (ky + 1) * 3 + (kx + 1)] * input[inBase + yy * side + xx];
            }
          }
        }
        out[(co * side + y) * side + x] = sum;
      }
    }
  }
  return out;
}

function conv3x3Backward(
  input: Float64Array,
  cin: number,
  side: number,
  weight: Float64Array,
  cout: number,
  dOut: Float64Array,
  dWeight: Float64Array,
  dBias: Float64Array,
): Float64Array {
  const dInput = new Float64Array(input.length);
  for (let co = 0; co < cout; co++) {
    const wBase = co * cin * 9;
    for (let y = 0; y < side; y++) {
      for (let x = 0; x < side; x++) {
        const grad = dOut[(co * side + y) * side + x];
        if (grad === 0) continue;
        dBias[co] += grad;
        for (let ci = 0; ci < cin; ci++) {
          const wOff = wBase + ci * 9;
          const inBase = ci * side * side;
          for (let ky = -1; ky <= 1; ky++) {
            const yy = y + ky;
            if (yy < 0 || yy >= side) continue;
            for (let kx = -1; kx <= 1; kx++) {
              const xx = x + kx;
              if (xx < 0 || xx >= side) continue;
              const idx = inBase + yy * side + xx;
              dWeight[wOff + (ky + 1) * 3 + (kx + 1)] += grad * input[idx];
              dInput[idx] += grad * weight[wOff + (ky + 1) * 3 + (kx + 1)];
            }
          }
        }
      }
    }
  }
  return dInput;
}

function maxPool2(
  input: Float64Array,
  channels: number,
  side: number,
  argOut: Int32Array,
): Float64Array {
  const half = side / 2;
  const out = new Float64Array(channels * half * half);
  for (let c = 0; c < channels; c++) {
    for (let y = 0; y < half; y++) {
      for (let x = 0; x < half; x++) {
        let best = -Infinity;
        let bestIdx = -1;
        for (let dy = 0; dy < 2; dy++) {
          for (let dx = 0; dx < 2; dx++) {
            const idx = (c * side + 2 * y + dy) * side + 2 * x + dx;
            if (input[idx] > best) {
              best = input[idx];
              bestIdx = idx;
            }
          }
        }
        const o = (c * half + y) * half + x;
        out[o] = best;
        argOut[o] = bestIdx;
      }
    }
  }
  return out;
}

function maxPool2Backward(
  dOut: Float64Array,
  channels: number,
  side: number,
  arg: Int32Array,
): Float64Array {
  const dIn = new Float64Array(channels * side * side);
  for (let o = 0; o < dOut.length; o++) dIn[arg[o]] += dOut[o];
  return dIn;
}
