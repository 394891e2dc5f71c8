/** Decoder for the binary PGM (P5) images the reconstruction service returns.
 *
 * The server emits `P5\n<w> <h>\n255\n` followed by raw row-major bytes; the
 * parser tolerates arbitrary whitespace and `#` comments in the header so any
 * conforming P5 stream decodes.
 */

export interface PgmImage {
  width: number;
  height: number;
  maxval: number;
  /** Row-major 8-bit intensities, 0 = black. */
  pixels: Uint8Array;
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c;
}

export function decodePgm(data: Uint8Array): PgmImage {
  const fields: string[] = [];
  let pos = 0;
  while (fields.length < 4) {
    while (pos < data.length && isSpace(data[pos])) pos++;
    if (pos >= data.length) throw new Error("truncated PGM header");
    if (data[pos] === 0x23) {
      // '#' comment runs to end of line
      while (pos < data.length && data[pos] !== 0x0a) pos++;
      continue;
    }
    let start = pos;
    while (pos < data.length && !isSpace(data[pos])) pos++;
    fields.push(String.fromCharCode(...data.subarray(start, pos)));
  }
  if (fields[0] !== "P5") throw new Error(`not a binary PGM: magic ${fields[0]}`);
  const width = Number(fields[1]);
  const height = Number(fields[2]);
  const maxval = Number(fields[3]);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new Error(`bad PGM dimensions ${fields[1]} x ${fields[2]}`);
  }
  if (maxval !== 255) throw new Error(`unsupported maxval ${fields[3]}`);
  pos += 1; // single whitespace byte after maxval
  const pixels = data.subarray(pos, pos + width * height);
  if (pixels.length !== width * height) throw new Error("truncated PGM pixel data");
  return { width, height, maxval, pixels: new Uint8Array(pixels) };
}

export function base64ToBytes(b64: string): Uint8Array {
  const binary = atob(b64);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

export function decodePgmBase64(b64: string): PgmImage {
  return decodePgm(base64ToBytes(b64));
}

/** Expand grayscale to RGBA for a canvas ImageData buffer. Pure so it can be
 * tested without a DOM. */
export function grayToRgba(image: PgmImage): Uint8ClampedArray {
  const out = new Uint8ClampedArray(image.width * image.height * 4);
  for (let i = 0; i < image.pixels.length; i++) {
    const v = image.pixels[i];
    out[4 * i] = v;
    out[4 * i + 1] = v;
    out[4 * i + 2] = v;
    out[4 * i + 3] = 255;
  }
  return out;
}
