/** Small DSP kit: framing, FFT magnitudes, mel filterbank energies. */

export function frameCount(nSamples: number, sampleRate: number, framePeriod: number): number {
  return Math.floor(nSamples / (sampleRate * framePeriod));
}

/** Iterate fixed-length analysis windows, one per posterior frame. */
export function frames(samples: Float32Array, sampleRate: number,
                       framePeriod: number, windowSize: number): Float32Array[] {
  const hop = Math.round(sampleRate * framePeriod);
  const n = frameCount(samples.length, sampleRate, framePeriod);
  const out: Float32Array[] = [];
  for (let i = 0; i < n; i++) {
    const start = i * hop;
    const frame = new Float32Array(windowSize);
    const end = Math.min(start + windowSize, samples.length);
    frame.set(samples.subarray(start, end));
    out.push(frame);
  }
  return out;
}

export function rms(frame: Float32Array): number {
  let acc = 0;
  for (let i = 0; i < frame.length; i++) acc += frame[i] * frame[i];
  return Math.sqrt(acc / Math.max(1, frame.length));
}

/** In-place iterative radix-2 FFT; re/im must be power-of-two length. */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if ((n & (n - 1)) !== 0) throw new Error("fft length must be a power of two");
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wRe = Math.cos(angle);
    const wIm = Math.sin(angle);
    for (let i = 0; i < n; i += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const uRe = re[i + k];
        const uIm = im[i + k];
        const vRe = re[i + k + len / 2] * curRe - im[i + k + len / 2] * curIm;
        const vIm = re[i + k + len / 2] * curIm + im[i + k + len / 2] * curRe;
        re[i + k] = uRe + vRe;
        im[i + k] = uIm + vIm;
        re[i + k + len / 2] = uRe - vRe;
        im[i + k + len / 2] = uIm - vIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

export function powerSpectrum(frame: Float32Array): Float64Array {
  const n = frame.length;
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    // Hann window
    re[i] = frame[i] * 0.5 * (1 - Math.cos((2 * Math.PI * i) / (n - 1)));
  }
  fft(re, im);
  const bins = n / 2 + 1;
  const power = new Float64Array(bins);
  for (let i = 0; i < bins; i++) power[i] = re[i] * re[i] + im[i] * im[i];
  return power;
}

function hzToMel(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

function melToHz(mel: number): number {
  return 700 * (Math.pow(10, mel / 2595) - 1);
}

/** Triangular mel filterbank over FFT bins. */
export function melFilterbank(nBands: number, fftSize: number, sampleRate: number,
                              fMin = 50, fMax?: number): number[][] {
  const top = fMax ?? sampleRate / 2;
  const bins = fftSize / 2 + 1;
  const melPoints = new Array(nBands + 2).fill(0).map(
    (_, i) => hzToMel(fMin) + ((hzToMel(top) - hzToMel(fMin)) * i) / (nBands + 1),
  );
  const binOf = melPoints.map((m) => Math.floor(((fftSize + 1) * melToHz(m)) / sampleRate));
  const bank: number[][] = [];
  for (let b = 1; b <= nBands; b++) {
    const filt = new Array(bins).fill(0);
    for (let k = binOf[b - 1]; k < binOf[b]; k++) {
      if (k >= 0 && k < bins && binOf[b] !== binOf[b - 1]) {
        filt[k] = (k - binOf[b - 1]) / (binOf[b] - binOf[b - 1]);
      }
    }
    for (let k = binOf[b]; k < binOf[b + 1]; k++) {
      if (k >= 0 && k < bins && binOf[b + 1] !== binOf[b]) {
        filt[k] = (binOf[b + 1] - k) / (binOf[b + 1] - binOf[b]);
      }
    }
    bank.push(filt);
  }
  return bank;
}

export function applyFilterbank(power: Float64Array, bank: number[][]): Float64Array {
  const out = new Float64Array(bank.length);
  for (let b = 0; b < bank.length; b++) {
    let acc = 0;
    const filt = bank[b];
    for (let k = 0; k < filt.length; k++) {
      if (filt[k] !== 0) acc += filt[k] * power[k];
    }
    out[b] = acc;
  }
  return out;
}

export function logCompress(values: Float64Array, floor = 1e-10): Float64Array {
  const out = new Float64Array(values.length);
  for (let i = 0; i < values.length; i++) out[i] = Math.log(values[i] + floor);
  return out;
}
