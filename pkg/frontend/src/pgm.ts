// Minimal decoder for the P5 images the service returns (maxval 255).

export interface PgmImage {
  width: number;
  height: number;
  luminance: Uint8Array;
}

export function decodeBase64(data: string): Uint8Array {
  const binary = atob(data);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

export function parsePgm(bytes: Uint8Array): PgmImage {
  let pos = 0;
  const isSpace = (b: number) => b === 0x20 || b === 0x0a || b === 0x0d || b === 0x09;

  function token(): string {
    while (pos < bytes.length && isSpace(bytes[pos])) pos++;
    if (bytes[pos] === 0x23) {
      // comment to end of line
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      return token();
    }
    const start = pos;
    while (pos < bytes.length && !isSpace(bytes[pos])) pos++;
    if (start === pos) throw new Error("truncated PGM header");
    return String.fromCharCode(...bytes.subarray(start, pos));
  }

  if (token() !== "P5") throw new Error("expected a P5 image");
  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  const maxval = parseInt(token(), 10);
  if (!(width > 0) || !(height > 0) || maxval !== 255) {
    throw new Error("unsupported PGM header");
  }
  pos++; // the single whitespace byte after maxval
  const luminance = bytes.subarray(pos, pos + width * height);
  if (luminance.length !== width * height) throw new Error("truncated PGM data");
  return { width, height, luminance };
}
