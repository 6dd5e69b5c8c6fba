import { describe, expect, it } from "vitest";
import { SmallConvNet, crossEntropy, softmax } from "../src/model.js";
import { mulberry32 } from "../src/rng.js";

function randomInput(net: SmallConvNet, seed: number): Float64Array {
  const rng = mulberry32(seed);
  const input = new Float64Array(3 * net.inputSize * net.inputSize);
  for (let i = 0; i < input.length; i++) input[i] = rng();
  return input;
}

describe("softmax", () => {
  it("sums to 1 within 1e-6 and stays in [0,1]", () => {
    const rng = mulberry32(1);
    for (let trial = 0; trial < 50; trial++) {
      const logits = new Float64Array(7);
      for (let i = 0; i < logits.length; i++) logits[i] = (rng() - 0.5) * 20;
      const p = softmax(logits);
      const sum = p.reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - 1)).toBeLessThan(1e-6);
      for (const v of p) {
        expect(v).toBeGreaterThanOrEqual(0);
        expect(v).toBeLessThanOrEqual(1);
      }
    }
  });

  it("is invariant to constant logit shifts", () => {
    const logits = Float64Array.from([1, 2, 3]);
    const shifted = Float64Array.from([101, 102, 103]);
    const a = softmax(logits);
    const b = softmax(shifted);
    for (let i = 0; i < 3; i++) expect(a[i]).toBeCloseTo(b[i], 12);
  });
});

describe("cross-entropy", () => {
  it("is ~0 when the prediction matches a one-hot target", () => {
    const probs = Float64Array.from([1e-9, 1 - 2e-9, 1e-9]);
    expect(crossEntropy(probs, 1)).toBeLessThan(1e-6);
  });

  it("grows as the true-class probability shrinks", () => {
    expect(crossEntropy(Float64Array.from([0.1, 0.9]), 0)).toBeGreaterThan(
      crossEntropy(Float64Array.from([0.5, 0.5]), 0),
    );
  });
});

describe("gradient check", () => {
  it("analytic gradients match central differences within 1e-4 relative", () => {
    const net = new SmallConvNet(8, 3, 42, [4, 6]);
    const input = randomInput(net, 7);
    const label = 1;

    net.zeroGrad();
    net.backward(input, label);

    const lossAt = () => {
      const { logits } = net.forward(input);
      return crossEntropy(softmax(logits), label);
    };

    const eps = 1e-6;
    const rng = mulberry32(99);
    for (const param of net.params) {
      // sample a handful of coordinates per tensor
      const picks = Math.min(10, param.value.length);
      for (let t = 0; t < picks; t++) {
        const i = Math.floor(rng() * param.value.length);
        const orig = param.value[i];
        param.value[i] = orig + eps;
        const up = lossAt();
        param.value[i] = orig - eps;
        const down = lossAt();
        param.value[i] = orig;
        const numeric = (up - down) / (2 * eps);
        const analytic = param.grad[i];
        const scale = Math.max(Math.abs(numeric), Math.abs(analytic), 1e-6);
        expect(Math.abs(numeric - analytic) / scale).toBeLessThan(1e-4);
      }
    }
  });
});

describe("forward pass", () => {
  it("softmax head output sums to 1 on real activations", () => {
    const net = new SmallConvNet(16, 4, 3);
    const p = softmax(net.forward(randomInput(net, 5)).logits);
    expect(Math.abs(p.reduce((a, b) => a + b, 0) - 1)).toBeLessThan(1e-6);
  });

  it("rejects input sizes not divisible by the pooling factor", () => {
    expect(() => new SmallConvNet(9, 2, 0)).toThrow();
  });
});
