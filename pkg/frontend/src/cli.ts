/** `train` CLI: manifests in, JSON report out. */

import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { DEFAULT_CONFIG, runTraining, type TrainConfig } from "./train.js";
import type { AcMode } from "./dataset.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("train")
    .option("manifest", { type: "string", demandOption: true, array: true })
    .option("use-ac", {
      choices: ["replace", "extend", "off"] as const,
      default: "off",
    })
    .option("epochs", { type: "number", default: DEFAULT_CONFIG.epochs })
    .option("batch-size", { type: "number", default: DEFAULT_CONFIG.batchSize })
    .option("lr", { type: "number", default: DEFAULT_CONFIG.learningRate })
    .option("input-size", { type: "number", default: DEFAULT_CONFIG.inputSize })
    .option("seed", { type: "number", default: 0 })
    .option("no-augment", { type: "boolean", default: false })
    .option("data-root", { type: "string" })
    .option("report", { type: "string", demandOption: true })
    .strict()
    .parseSync();

  const config: TrainConfig = {
    ...DEFAULT_CONFIG,
    manifests: args.manifest as string[],
    useAc: args["use-ac"] as AcMode,
    epochs: args.epochs,
    batchSize: args["batch-size"],
    learningRate: args.lr,
    inputSize: args["input-size"],
    seed: args.seed,
    augment: !args["no-augment"],
    dataRoot: args["data-root"],
  };

  try {
    const report = runTraining(config);
    writeFileSync(args.report, JSON.stringify(report, null, 2) + "\n");
    console.log(
      `test accuracy ${report.testAccuracy.toFixed(3)} over ` +
        `${report.testSamples} samples (${report.classNames.length} classes); ` +
        `report written to ${args.report}`,
    );
    for (const warning of report.warnings) console.warn(warning);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main(hideBin(process.argv));
