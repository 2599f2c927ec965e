/** Minimal RIFF/WAVE reader: PCM 8/16/24/32-bit and float32, any channel
 * count (mixed down to mono), with linear resampling to a target rate. */

import { AudioClip } from "./types.js";

export class WavError extends Error {}

export function decodeWav(buffer: Buffer): AudioClip {
  if (buffer.length < 44 || buffer.toString("ascii", 0, 4) !== "RIFF" ||
      buffer.toString("ascii", 8, 12) !== "WAVE") {
    throw new WavError("not a RIFF/WAVE file");
  }
  let fmt: { format: number; channels: number; sampleRate: number; bits: number } | null = null;
  let data: Buffer | null = null;

  let offset = 12;
  while (offset + 8 <= buffer.length) {
    const id = buffer.toString("ascii", offset, offset + 4);
    const size = buffer.readUInt32LE(offset + 4);
    const body = buffer.subarray(offset + 8, offset + 8 + size);
    if (id === "fmt ") {
      fmt = {
        format: body.readUInt16LE(0),
        channels: body.readUInt16LE(2),
        sampleRate: body.readUInt32LE(4),
        bits: body.readUInt16LE(14),
      };
    } else if (id === "data") {
      data = body;
    }
    offset += 8 + size + (size % 2); // chunks are word-aligned
  }
  if (!fmt) throw new WavError("missing fmt chunk");
  if (!data) throw new WavError("missing data chunk");
  if (fmt.channels < 1) throw new WavError("no channels");

  const samples = readSamples(data, fmt.format, fmt.bits);
  const mono = mixDown(samples, fmt.channels);
  return { samples: mono, sampleRate: fmt.sampleRate };
}

function readSamples(data: Buffer, format: number, bits: number): Float32Array {
  if (format === 3) {
    if (bits !== 32) throw new WavError(`unsupported float width ${bits}`);
    const n = Math.floor(data.length / 4);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) out[i] = data.readFloatLE(i * 4);
    return out;
  }
  if (format !== 1) throw new WavError(`unsupported wav format code ${format}`);
  if (bits === 16) {
    const n = Math.floor(data.length / 2);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) out[i] = data.readInt16LE(i * 2) / 32768;
    return out;
  }
  if (bits === 8) {
    const out = new Float32Array(data.length);
    for (let i = 0; i < data.length; i++) out[i] = (data[i] - 128) / 128;
    return out;
  }
  if (bits === 24) {
    const n = Math.floor(data.length / 3);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      let v = data[i * 3] | (data[i * 3 + 1] << 8) | (data[i * 3 + 2] << 16);
      if (v & 0x800000) v |= ~0xffffff; // sign-extend
      out[i] = v / 8388608;
    }
    return out;
  }
  if (bits === 32) {
    const n = Math.floor(data.length / 4);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) out[i] = data.readInt32LE(i * 4) / 2147483648;
    return out;
  }
  throw new WavError(`unsupported bit depth ${bits}`);
}

function mixDown(interleaved: Float32Array, channels: number): Float32Array {
  if (channels === 1) return interleaved;
  const frames = Math.floor(interleaved.length / channels);
  const mono = new Float32Array(frames);
  for (let f = 0; f < frames; f++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) acc += interleaved[f * channels + c];
    mono[f] = acc / channels;
  }
  return mono;
}

export function resample(clip: AudioClip, targetRate: number): AudioClip {
  if (clip.sampleRate === targetRate) return clip;
  const ratio = clip.sampleRate / targetRate;
  const n = Math.max(1, Math.floor(clip.samples.length / ratio));
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const pos = i * ratio;
    const lo = Math.floor(pos);
    const hi = Math.min(lo + 1, clip.samples.length - 1);
    const frac = pos - lo;
    out[i] = clip.samples[lo] * (1 - frac) + clip.samples[hi] * frac;
  }
  return { samples: out, sampleRate: targetRate };
}

/** PCM16 mono encoder, handy for tests and fixture generation. */
export function encodeWav(samples: Float32Array, sampleRate: number): Buffer {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(v * 32767), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20);       // PCM
  header.writeUInt16LE(1, 22);       // mono
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}
