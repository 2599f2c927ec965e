/** Per-file extraction: decode audio, run the configured models, emit MSDF.
 *
 * Embeddings are computed on the sliding-window grid over the full file
 * extent; the back-end re-derives that grid and picks the speech windows.
 */

import { promises as fs } from "fs";
import * as path from "path";

import {
  loadEmbedModel,
  loadEnhanceModel,
  loadOsdModel,
  loadVadModel,
} from "./models.js";
import { encodeMsdf } from "./msdf.js";
import { segmentExtent } from "./segmenter.js";
import { ExtractorConfig, FeatureFile, SegmentTable } from "./types.js";
import { decodeWav, resample } from "./wav.js";

const TARGET_RATE = 16000;

export interface ExtractReport {
  written: string[];
  skipped: Array<{ file: string; reason: string }>;
}

export function defaultConfig(): ExtractorConfig {
  return {
    audioDir: ".",
    outDir: ".",
    framePeriod: 0.01,
    scales: [
      { window: 1.5, shift: 0.75 },
      { window: 1.0, shift: 0.5 },
      { window: 0.5, shift: 0.25 },
    ],
    vadModel: "energy",
    osdModel: "flux",
    embedModel: "melstats",
    enhanceModel: "none",
  };
}

export function validateConfig(config: ExtractorConfig): void {
  if (config.scales.length === 0) throw new Error("scale list must be nonempty");
  if (!(config.framePeriod > 0)) throw new Error("frame_period must be > 0");
  for (const s of config.scales) {
    if (!(s.shift > 0 && s.shift <= s.window)) {
      throw new Error(`bad scale window=${s.window} shift=${s.shift}`);
    }
  }
}

export async function extractFile(audioPath: string,
                                  config: ExtractorConfig): Promise<FeatureFile> {
  // model lookups abort before any decoding if an identifier is unknown
  const enhance = loadEnhanceModel(config.enhanceModel);
  const vad = loadVadModel(config.vadModel);
  const osd = loadOsdModel(config.osdModel);
  const embed = loadEmbedModel(config.embedModel);

  const raw = await fs.readFile(audioPath);
  const clip = enhance(resample(decodeWav(raw), TARGET_RATE));
  const extent = clip.samples.length / clip.sampleRate;

  const vadTrack = vad(clip, config.framePeriod);
  const osdTrack = osd(clip, config.framePeriod);

  const scales: SegmentTable[] = config.scales.map((scale) => {
    const times = segmentExtent(extent, scale);
    const vectors = times.map(([s, e]) => embed(clip, s, e));
    return { scale, times, vectors };
  });

  return {
    recordingId: path.basename(audioPath).replace(/\.[^.]+$/, ""),
    framePeriod: config.framePeriod,
    tracks: [
      { name: "vad0", values: vadTrack },
      { name: "osd0", values: osdTrack },
    ],
    scales,
  };
}

export async function extractBatch(config: ExtractorConfig): Promise<ExtractReport> {
  validateConfig(config);
  const report: ExtractReport = { written: [], skipped: [] };
  const entries = (await fs.readdir(config.audioDir))
    .filter((f) => f.toLowerCase().endsWith(".wav"))
    .sort();
  await fs.mkdir(config.outDir, { recursive: true });
  for (const entry of entries) {
    const audioPath = path.join(config.audioDir, entry);
    try {
      const file = await extractFile(audioPath, config);
      const outPath = path.join(config.outDir, file.recordingId + ".msdf");
      await fs.writeFile(outPath, encodeMsdf(file));
      report.written.push(outPath);
    } catch (err) {
      if (err instanceof Error && /unknown .* model/.test(err.message)) {
        throw err; // model problems abort the whole batch
      }
      report.skipped.push({ file: audioPath, reason: String(err) });
    }
  }
  return report;
}
