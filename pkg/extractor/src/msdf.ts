/** MSDF v1 writer/reader.
 *
 * Layout (little-endian, f32 payloads, f64 times):
 *   "MSDF" | u16 version=1 | u16 name_len + recording_id | f64 frame_period
 *   u16 n_tracks | per track: u16 name_len + name, u32 n_frames, f32*n
 *   u16 n_scales | per scale: f64 window, f64 shift, u32 n_segments, u32 dim,
 *                  (f64 start, f64 end)*n_segments, f32*(n_segments*dim)
 */

import { FeatureFile } from "./types.js";

const MAGIC = "MSDF";
const VERSION = 1;

export class MsdfError extends Error {}

export function encodeMsdf(file: FeatureFile): Buffer {
  const parts: Buffer[] = [];
  parts.push(Buffer.from(MAGIC, "ascii"));
  parts.push(u16(VERSION));
  parts.push(name(file.recordingId));
  parts.push(f64(file.framePeriod));

  parts.push(u16(file.tracks.length));
  for (const track of file.tracks) {
    for (const v of track.values) {
      if (!(v >= 0 && v <= 1)) {
        throw new MsdfError(`track ${track.name}: posterior ${v} outside [0, 1]`);
      }
    }
    parts.push(name(track.name));
    parts.push(u32(track.values.length));
    parts.push(f32Array(track.values));
  }

  parts.push(u16(file.scales.length));
  for (const table of file.scales) {
    const dim = table.vectors.length > 0 ? table.vectors[0].length : 0;
    if (table.vectors.length !== table.times.length) {
      throw new MsdfError("segment count != embedding rows");
    }
    parts.push(f64(table.scale.window));
    parts.push(f64(table.scale.shift));
    parts.push(u32(table.times.length));
    parts.push(u32(dim));
    const times = Buffer.alloc(16 * table.times.length);
    table.times.forEach(([s, e], i) => {
      times.writeDoubleLE(s, i * 16);
      times.writeDoubleLE(e, i * 16 + 8);
    });
    parts.push(times);
    const vectors = Buffer.alloc(4 * table.times.length * dim);
    table.vectors.forEach((row, i) => {
      if (row.length !== dim) throw new MsdfError("ragged embedding rows");
      row.forEach((v, j) => vectors.writeFloatLE(v, (i * dim + j) * 4));
    });
    parts.push(vectors);
  }
  return Buffer.concat(parts);
}

export function decodeMsdf(buffer: Buffer): FeatureFile {
  const r = new Reader(buffer);
  if (r.bytes(4, "header").toString("ascii") !== MAGIC) {
    throw new MsdfError("bad magic");
  }
  const version = r.u16("header");
  if (version !== VERSION) throw new MsdfError(`unsupported version ${version}`);
  const recordingId = r.name("header");
  const framePeriod = r.f64("header");

  const tracks: FeatureFile["tracks"] = [];
  const nTracks = r.u16("tracks");
  for (let t = 0; t < nTracks; t++) {
    const trackName = r.name(`track[${t}]`);
    const nFrames = r.u32(`track[${t}]`);
    tracks.push({ name: trackName, values: r.f32Array(nFrames, `track[${t}] values`) });
  }

  const scales: FeatureFile["scales"] = [];
  const nScales = r.u16("scales");
  for (let s = 0; s < nScales; s++) {
    const window = r.f64(`scale[${s}]`);
    const shift = r.f64(`scale[${s}]`);
    const nSegments = r.u32(`scale[${s}]`);
    const dim = r.u32(`scale[${s}]`);
    const times: Array<[number, number]> = [];
    for (let i = 0; i < nSegments; i++) {
      times.push([r.f64(`scale[${s}] segments`), r.f64(`scale[${s}] segments`)]);
    }
    const vectors: Float32Array[] = [];
    for (let i = 0; i < nSegments; i++) {
      vectors.push(r.f32Array(dim, `scale[${s}] embeddings`));
    }
    scales.push({ scale: { window, shift }, times, vectors });
  }
  if (!r.atEnd()) throw new MsdfError("trailing bytes");
  return { recordingId, framePeriod, tracks, scales };
}

class Reader {
  private offset = 0;
  constructor(private buffer: Buffer) {}

  bytes(n: number, section: string): Buffer {
    if (this.offset + n > this.buffer.length) {
      throw new MsdfError(`truncated ${section}`);
    }
    const out = this.buffer.subarray(this.offset, this.offset + n);
    this.offset += n;
    return out;
  }

  u16(section: string): number {
    return this.bytes(2, section).readUInt16LE(0);
  }

  u32(section: string): number {
    return this.bytes(4, section).readUInt32LE(0);
  }

  f64(section: string): number {
    return this.bytes(8, section).readDoubleLE(0);
  }

  name(section: string): string {
    const len = this.u16(section);
    return this.bytes(len, section).toString("utf-8");
  }

  f32Array(count: number, section: string): Float32Array {
    const raw = this.bytes(4 * count, section);
    const out = new Float32Array(count);
    for (let i = 0; i < count; i++) out[i] = raw.readFloatLE(i * 4);
    return out;
  }

  atEnd(): boolean {
    return this.offset === this.buffer.length;
  }
}

function u16(v: number): Buffer {
  const b = Buffer.alloc(2);
  b.writeUInt16LE(v, 0);
  return b;
}

function u32(v: number): Buffer {
  const b = Buffer.alloc(4);
  b.writeUInt32LE(v, 0);
  return b;
}

function f64(v: number): Buffer {
  const b = Buffer.alloc(8);
  b.writeDoubleLE(v, 0);
  return b;
}

function name(text: string): Buffer {
  const raw = Buffer.from(text, "utf-8");
  return Buffer.concat([u16(raw.length), raw]);
}

function f32Array(values: Float32Array): Buffer {
  const b = Buffer.alloc(4 * values.length);
  for (let i = 0; i < values.length; i++) b.writeFloatLE(values[i], i * 4);
  return b;
}
