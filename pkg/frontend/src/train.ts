/** Training loop: SGD with momentum, step lr decay, optional augmentation. */

import { buildDataset, loadSample, type AcMode, type Sample } from "./dataset.js";
import { decodeImage, randomResizedCrop, resize, type Raster } from "./image.js";
import { SmallConvNet } from "./model.js";
import { mulberry32, shuffle } from "./rng.js";

export interface TrainConfig {
  manifests: string[];
  useAc: AcMode;
  epochs: number;
  batchSize: number;
  learningRate: number;
  lrDecayFactor: number;
  lrDecayPeriod: number;
  momentum: number;
  weightDecay: number;
  inputSize: number;
  seed: number;
  augment: boolean;
  dataRoot?: string;
}

/** Full-scale training defaults, scaled to desk size only where noted. */
export const DEFAULT_CONFIG: TrainConfig = {
  manifests: [],
  useAc: "off",
  epochs: 90,
  batchSize: 64,
  learningRate: 0.1,
  lrDecayFactor: 0.1,
  lrDecayPeriod: 30,
  momentum: 0.9,
  weightDecay: 1e-4,
  inputSize: 32, // 224 / 299 remain valid values for full-size backbones
  seed: 0,
  augment: true,
};

export interface EvalReport {
  testAccuracy: number;
  perClassAccuracy: number[];
  classNames: string[];
  lossCurve: number[];
  trainAccuracyCurve: number[];
  config: TrainConfig;
  trainSamples: number;
  testSamples: number;
  warnings: string[];
}

export interface LoadedSample {
  raster: Raster;
  label: number;
}

export function scheduledLr(config: TrainConfig, epoch: number): number {
  const steps = Math.floor(epoch / config.lrDecayPeriod);
  return config.learningRate * config.lrDecayFactor ** steps;
}

/** Core loop over already-decoded samples (tests drive this directly). */
export function trainOnSamples(
  trainSet: LoadedSample[],
  numClasses: number,
  config: TrainConfig,
): { model: SmallConvNet; lossCurve: number[]; trainAccuracyCurve: number[] } {
  if (trainSet.length === 0) throw new Error("training set is empty");
  if (numClasses < 2) throw new Error("need at least 2 classes");
  const model = new SmallConvNet(config.inputSize, numClasses, config.seed);
  const rng = mulberry32(config.seed ^ 0x5eed);
  const lossCurve: number[] = [];
  const trainAccuracyCurve: number[] = [];

  const plain = trainSet.map((s) =>
    model.toInput(resize(s.raster, config.inputSize, config.inputSize)),
  );

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    const lr = scheduledLr(config, epoch);
    const order = shuffle([...trainSet.keys()], rng);
    let epochLoss = 0;
    let hits = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize);
      model.zeroGrad();
      for (const idx of batch) {
        const input = config.augment
          ? model.toInput(randomResizedCrop(trainSet[idx].raster, config.inputSize, rng))
          : plain[idx];
        const { loss, correct } = model.backward(input, trainSet[idx].label);
        epochLoss += loss;
        if (correct) hits += 1;
      }
      model.step(lr, config.momentum, config.weightDecay, batch.length);
    }
    const meanLoss = epochLoss / order.length;
    if (!Number.isFinite(meanLoss)) {
      throw new Error(`training diverged at epoch ${epoch}: loss=${meanLoss}`);
    }
    lossCurve.push(meanLoss);
    trainAccuracyCurve.push(hits / order.length);
  }
  return { model, lossCurve, trainAccuracyCurve };
}

export function evaluateOnSamples(
  model: SmallConvNet,
  testSet: LoadedSample[],
  numClasses: number,
): { accuracy: number; perClass: number[] } {
  if (testSet.length === 0) throw new Error("test set is empty");
  const hits = new Array(numClasses).fill(0);
  const totals = new Array(numClasses).fill(0);
  for (const sample of testSet) {
    const input = model.toInput(
      resize(sample.raster, model.inputSize, model.inputSize),
    );
    totals[sample.label] += 1;
    if (model.predict(input) === sample.label) hits[sample.label] += 1;
  }
  const correct = hits.reduce((a, b) => a + b, 0);
  const perClass = hits.map((h, i) => (totals[i] > 0 ? h / totals[i] : 0));
  return { accuracy: correct / testSet.length, perClass };
}

function loadAll(samples: Sample[], size: number): LoadedSample[] {
  // Decode once at 2x the input size so the random crop has room to vary.
  return samples.map((s) => ({
    raster: resize(decodeImage(s.path), size * 2, size * 2),
    label: s.label,
  }));
}

/** Manifest in, report out: the full train/evaluate pipeline. */
export function runTraining(config: TrainConfig): EvalReport {
  const dataset = buildDataset(config.manifests, config.useAc, config.dataRoot);
  const numClasses = dataset.classNames.length;
  const trainSet = loadAll(dataset.train, config.inputSize);
  const testSet = dataset.test.map((s) => ({
    raster: loadSample(s, config.inputSize),
    label: s.label,
  }));
  const { model, lossCurve, trainAccuracyCurve } = trainOnSamples(
    trainSet,
    numClasses,
    config,
  );
  const { accuracy, perClass } = evaluateOnSamples(model, testSet, numClasses);
  return {
    testAccuracy: accuracy,
    perClassAccuracy: perClass,
    classNames: dataset.classNames,
    lossCurve,
    trainAccuracyCurve,
    config,
    trainSamples: trainSet.length,
    testSamples: testSet.length,
    warnings: dataset.warnings,
  };
}
