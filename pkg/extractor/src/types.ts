/** Shared types for the extractor pipeline. */

export interface ScaleSpec {
  /** Window length in seconds. */
  window: number;
  /** Hop between window starts in seconds; 0 < shift <= window. */
  shift: number;
}

export interface AudioClip {
  /** Mono samples in [-1, 1]. */
  samples: Float32Array;
  sampleRate: number;
}

export interface SegmentTable {
  scale: ScaleSpec;
  /** [start, end] pairs in seconds, one per segment. */
  times: Array<[number, number]>;
  /** One embedding row per segment, all the same length. */
  vectors: Float32Array[];
}

export interface FeatureFile {
  recordingId: string;
  framePeriod: number;
  tracks: Array<{ name: string; values: Float32Array }>;
  scales: SegmentTable[];
}

export interface ExtractorConfig {
  audioDir: string;
  outDir: string;
  framePeriod: number;
  scales: ScaleSpec[];
  vadModel: string;
  osdModel: string;
  embedModel: string;
  enhanceModel: string;
}
