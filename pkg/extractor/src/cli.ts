#!/usr/bin/env node
/** CLI for batch feature extraction, mirroring the back-end flag style. */

import { promises as fs } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { defaultConfig, extractBatch } from "./extract.js";
import { parseScaleList } from "./segmenter.js";
import { ExtractorConfig } from "./types.js";

async function loadConfigFile(path: string): Promise<Partial<ExtractorConfig>> {
  const raw = JSON.parse(await fs.readFile(path, "utf-8"));
  const out: Partial<ExtractorConfig> = {};
  if (raw.audio_dir !== undefined) out.audioDir = String(raw.audio_dir);
  if (raw.out_dir !== undefined) out.outDir = String(raw.out_dir);
  if (raw.frame_period !== undefined) out.framePeriod = Number(raw.frame_period);
  if (raw.scales !== undefined) {
    out.scales = (raw.scales as Array<{ window: number; shift: number }>).map(
      (s) => ({ window: Number(s.window), shift: Number(s.shift) }),
    );
  }
  if (raw.vad_model !== undefined) out.vadModel = String(raw.vad_model);
  if (raw.osd_model !== undefined) out.osdModel = String(raw.osd_model);
  if (raw.embed_model !== undefined) out.embedModel = String(raw.embed_model);
  if (raw.enhance_model !== undefined) out.enhanceModel = String(raw.enhance_model);
  return out;
}

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("extract", "extract MSDF feature files from a directory of wavs")
    .demandCommand(1)
    .option("config", { type: "string", describe: "JSON config file" })
    .option("audio-dir", { type: "string", describe: "directory of .wav inputs" })
    .option("out-dir", { type: "string", describe: "directory for .msdf outputs" })
    .option("frame-period", { type: "number", describe: "posterior frame spacing (s)" })
    .option("scales", {
      type: "string",
      describe: "comma list of window:shift pairs, e.g. 1.5:0.75,1.0:0.5,0.5:0.25",
    })
    .option("vad-model", { type: "string" })
    .option("osd-model", { type: "string" })
    .option("embed-model", { type: "string" })
    .option("enhance-model", { type: "string" })
    .strict()
    .help()
    .parse();

  let config = defaultConfig();
  if (argv.config) config = { ...config, ...(await loadConfigFile(argv.config)) };
  if (argv.audioDir) config.audioDir = argv.audioDir;
  if (argv.outDir) config.outDir = argv.outDir;
  if (argv.framePeriod !== undefined) config.framePeriod = argv.framePeriod;
  if (argv.scales) config.scales = parseScaleList(argv.scales);
  if (argv.vadModel) config.vadModel = argv.vadModel;
  if (argv.osdModel) config.osdModel = argv.osdModel;
  if (argv.embedModel) config.embedModel = argv.embedModel;
  if (argv.enhanceModel) config.enhanceModel = argv.enhanceModel;

  const report = await extractBatch(config);
  for (const written of report.written) {
    console.log(`wrote ${written}`);
  }
  for (const { file, reason } of report.skipped) {
    console.error(`SKIPPED ${file}: ${reason}`);
  }
  if (report.written.length === 0 && report.skipped.length === 0) {
    console.error("no .wav files found in " + config.audioDir);
  }
  return report.skipped.length > 0 ? 1 : 0;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(2);
  });
