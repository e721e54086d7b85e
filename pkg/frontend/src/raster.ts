/** Software RGBA canvas with lines, rectangles and bitmap text. */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph, textWidth } from "./font.js";
import { encodePng } from "./png.js";

export type Color = [number, number, number];

export const BLACK: Color = [0, 0, 0];
export const WHITE: Color = [255, 255, 255];
export const GREY: Color = [200, 200, 200];

/** Distinguishable curve colors, cycled by index. */
export const SERIES_COLORS: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [255, 127, 14],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [23, 190, 207],
];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background[0];
      this.data[4 * i + 1] = background[1];
      this.data[4 * i + 2] = background[2];
      this.data[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (Math.floor(y) * this.width + Math.floor(x));
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) {
        this.set(x, y, color);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Color, thick = 1): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      if (thick > 1) {
        this.fillRect(xa - (thick >> 1), ya - (thick >> 1), thick, thick, color);
      } else {
        this.set(xa, ya, color);
      }
      if (xa === xb && ya === yb) break;
      const doubled = 2 * err;
      if (doubled >= dy) {
        err += dy;
        xa += sx;
      }
      if (doubled <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  text(x: number, y: number, content: string, color: Color = BLACK, scale = 1): void {
    let cursor = Math.round(x);
    const top = Math.round(y);
    for (const char of content) {
      const rows = glyph(char);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let c = 0; c < GLYPH_WIDTH; c++) {
          if (rows[r][c] === "#") {
            this.fillRect(cursor + c * scale, top + r * scale, scale, scale, color);
          }
        }
      }
      cursor += (GLYPH_WIDTH + 1) * scale;
    }
  }

  textCentered(cx: number, y: number, content: string, color: Color = BLACK, scale = 1): void {
    this.text(cx - textWidth(content, scale) / 2, y, content, color, scale);
  }

  toPng(): Buffer {
    return encodePng(this.width, this.height, this.data);
  }
}
