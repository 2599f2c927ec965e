/** Pluggable analysis models.
 *
 * The back-end contract is the feature file, not the models, so each stage
 * (enhancement, VAD, OSD, embedding) is a named entry in a registry. The
 * built-ins are lightweight signal-processing stand-ins that run anywhere;
 * heavier pretrained models can be registered under new identifiers without
 * touching the pipeline.
 */

import {
  applyFilterbank,
  frames,
  logCompress,
  melFilterbank,
  powerSpectrum,
  rms,
} from "./dsp.js";
import { AudioClip } from "./types.js";

export type EnhanceModel = (clip: AudioClip) => AudioClip;
export type PosteriorModel = (clip: AudioClip, framePeriod: number) => Float32Array;
export type EmbeddingModel = (clip: AudioClip, start: number, end: number) => Float32Array;

const FFT_SIZE = 512;
const MEL_BANDS = 32;
const ABSOLUTE_SILENCE_DB = -55;

function clamp01(v: number): number {
  return Math.max(0, Math.min(1, v));
}

function sigmoid(v: number): number {
  return 1 / (1 + Math.exp(-v));
}

function frameDb(clip: AudioClip, framePeriod: number): Float64Array {
  const windows = frames(clip.samples, clip.sampleRate, framePeriod, FFT_SIZE);
  const db = new Float64Array(windows.length);
  windows.forEach((w, i) => {
    db[i] = 20 * Math.log10(rms(w) + 1e-10);
  });
  return db;
}

function percentile(values: Float64Array, q: number): number {
  if (values.length === 0) return 0;
  const sorted = Float64Array.from(values).sort();
  const idx = Math.min(sorted.length - 1, Math.floor(q * sorted.length));
  return sorted[idx];
}

/** Energy VAD: log-RMS against an adaptive noise floor with a hard
 * absolute silence gate, squashed to a posterior. */
function energyVad(clip: AudioClip, framePeriod: number): Float32Array {
  const db = frameDb(clip, framePeriod);
  const floor = percentile(db, 0.1);
  const threshold = Math.max(floor + 12, ABSOLUTE_SILENCE_DB);
  const out = new Float32Array(db.length);
  for (let i = 0; i < db.length; i++) {
    out[i] = clamp01(sigmoid((db[i] - threshold) / 4));
  }
  return out;
}

/** Spectral-flux OSD stand-in: turbulence in the mel spectrum, gated by
 * the energy posterior so silence scores zero. */
function spectralFluxOsd(clip: AudioClip, framePeriod: number): Float32Array {
  const windows = frames(clip.samples, clip.sampleRate, framePeriod, FFT_SIZE);
  const bank = melFilterbank(MEL_BANDS, FFT_SIZE, clip.sampleRate);
  const vad = energyVad(clip, framePeriod);
  const flux = new Float64Array(windows.length);
  let prev: Float64Array | null = null;
  windows.forEach((w, i) => {
    const mel = logCompress(applyFilterbank(powerSpectrum(w), bank));
    if (prev) {
      let acc = 0;
      for (let b = 0; b < mel.length; b++) acc += Math.max(0, mel[b] - prev[b]);
      flux[i] = acc / mel.length;
    }
    prev = mel;
  });
  const scale = Math.max(percentile(flux, 0.95), 1e-6);
  const out = new Float32Array(flux.length);
  for (let i = 0; i < flux.length; i++) {
    out[i] = clamp01((flux[i] / scale) * vad[i]);
  }
  return out;
}

/** Mel-statistics embedding: mean and standard deviation of log-mel band
 * energies over the segment, L2-normalized. Rows are always finite and
 * nonzero (the log floor keeps silent segments away from the origin). */
function melStatsEmbedding(clip: AudioClip, start: number, end: number): Float32Array {
  const lo = Math.max(0, Math.floor(start * clip.sampleRate));
  const hi = Math.min(clip.samples.length, Math.ceil(end * clip.sampleRate));
  const segment = clip.samples.subarray(lo, Math.max(hi, lo + 1));
  const windows = frames(segment, clip.sampleRate, 0.01, FFT_SIZE);
  const bank = melFilterbank(MEL_BANDS, FFT_SIZE, clip.sampleRate);

  const mean = new Float64Array(MEL_BANDS);
  const sq = new Float64Array(MEL_BANDS);
  const n = Math.max(1, windows.length);
  for (const w of windows) {
    const mel = logCompress(applyFilterbank(powerSpectrum(w), bank));
    for (let b = 0; b < MEL_BANDS; b++) {
      mean[b] += mel[b] / n;
      sq[b] += (mel[b] * mel[b]) / n;
    }
  }
  const out = new Float32Array(2 * MEL_BANDS);
  for (let b = 0; b < MEL_BANDS; b++) {
    out[b] = mean[b];
    out[MEL_BANDS + b] = Math.sqrt(Math.max(0, sq[b] - mean[b] * mean[b]));
  }
  let norm = 0;
  for (const v of out) norm += v * v;
  norm = Math.sqrt(norm) || 1;
  for (let i = 0; i < out.length; i++) out[i] /= norm;
  return out;
}

const enhanceModels: Record<string, EnhanceModel> = {
  none: (clip) => clip,
};

const vadModels: Record<string, PosteriorModel> = {
  energy: energyVad,
};

const osdModels: Record<string, PosteriorModel> = {
  flux: spectralFluxOsd,
};

const embedModels: Record<string, EmbeddingModel> = {
  melstats: melStatsEmbedding,
};

function pick<T>(registry: Record<string, T>, id: string, kind: string): T {
  const model = registry[id];
  if (!model) {
    const known = Object.keys(registry).join(", ");
    throw new Error(`unknown ${kind} model '${id}' (available: ${known})`);
  }
  return model;
}

export const loadEnhanceModel = (id: string) => pick(enhanceModels, id, "enhancement");
export const loadVadModel = (id: string) => pick(vadModels, id, "vad");
export const loadOsdModel = (id: string) => pick(osdModels, id, "osd");
export const loadEmbedModel = (id: string) => pick(embedModels, id, "embedding");
