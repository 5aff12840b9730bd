/** Evidence highlighting: split an abstract into marked/unmarked segments.
 *
 * The abstract text is never altered — concatenating the segments always
 * reproduces the input exactly. Ranges that cannot be rendered safely
 * (out of bounds, inverted, non-integer, overlapping an earlier range) are
 * dropped with a warning rather than risking corrupted text.
 */

export interface Segment {
  text: string;
  marked: boolean;
}

export type Warn = (message: string) => void;

function validRange(span: [number, number], length: number): boolean {
  const [start, end] = span;
  return (
    Number.isInteger(start) &&
    Number.isInteger(end) &&
    start >= 0 &&
    end <= length &&
    start < end
  );
}

export function segmentHighlights(
  text: string,
  spans: [number, number][],
  warn: Warn = (m) => console.warn(m),
): Segment[] {
  const kept: [number, number][] = [];
  const sorted = [...spans].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  for (const span of sorted) {
    if (!validRange(span, text.length)) {
      warn(`dropping out-of-bounds highlight [${span[0]}, ${span[1]}) for text of length ${text.length}`);
      continue;
    }
    const last = kept[kept.length - 1];
    if (last && span[0] < last[1]) {
      warn(`dropping overlapping highlight [${span[0]}, ${span[1]})`);
      continue;
    }
    kept.push(span);
  }

  const segments: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of kept) {
    if (start > cursor) {
      segments.push({ text: text.slice(cursor, start), marked: false });
    }
    segments.push({ text: text.slice(start, end), marked: true });
    cursor = end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), marked: false });
  }
  return segments;
}

/** Render segments as DOM nodes, <mark> for highlighted stretches. */
export function renderHighlights(
  text: string,
  spans: [number, number][],
  warn?: Warn,
): DocumentFragment {
  const fragment = document.createDocumentFragment();
  for (const segment of segmentHighlights(text, spans, warn)) {
    if (segment.marked) {
      const mark = document.createElement("mark");
      mark.textContent = segment.text;
      fragment.appendChild(mark);
    } else {
      fragment.appendChild(document.createTextNode(segment.text));
    }
  }
  return fragment;
}
