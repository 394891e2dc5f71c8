/** Minimal k-mer index helpers mirroring the server's conventions:
 * A=0, C=1, G=2, T=3, first letter most significant (lexicographic order). */

export const ALPHABET = "ACGT";

export function kmerFromIndex(index: number, k: number): string {
  let word = "";
  for (let t = k - 1; t >= 0; t--) {
    word += ALPHABET[(index >> (2 * t)) & 3];
  }
  return word;
}

export function kmerIndex(word: string): number {
  let value = 0;
  for (const letter of word) {
    const code = ALPHABET.indexOf(letter);
    if (code < 0) throw new Error(`invalid nucleotide ${letter}`);
    value = (value << 2) | code;
  }
  return value;
}

export function allKmers(k: number): string[] {
  const words: string[] = [];
  for (let i = 0; i < 4 ** k; i++) words.push(kmerFromIndex(i, k));
  return words;
}

/** Grid-cell block of a k-mer inside a 2^r x 2^r image (r >= k): the order-k
 * cell (i, j), scaled to pixel bounds. Row bit l-1 is set when letter l is A
 * or T, column bit when it is G or T. */
export function kmerPixelBlock(
  word: string,
  resolution: number
): { top: number; left: number; size: number } {
  const k = word.length;
  let i = 0;
  let j = 0;
  for (let l = 0; l < k; l++) {
    const code = kmerIndex(word[l]);
    const column = code >> 1;
    const row = 1 ^ ((code >> 1) ^ (code & 1));
    j |= column << l;
    i |= row << l;
  }
  const size = 2 ** (resolution - k);
  return { top: i * size, left: j * size, size };
}
