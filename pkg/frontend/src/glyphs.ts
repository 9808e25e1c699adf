// Compact sign glyphs: simple vector shapes with visible text labels and
// text alternatives, legible at browser-bar size and without color vision.

import type { SignValues } from './api.js';

export interface Glyph {
  axis: 'privacy' | 'code_data' | 'objectivity';
  value: string;
  label: string;
  description: string;
  svg: string;
}

const SVG_OPEN = { width: 20, height: 20 };

function svgWrap(inner: string, title: string): string {
  return (
    `<svg viewBox="0 0 ${SVG_OPEN.width} ${SVG_OPEN.height}" width="20" height="20" ` +
    `role="img" aria-label="${title}"><title>${title}</title>${inner}</svg>`
  );
}

const LOCK_BODY = '<rect x="4" y="9" width="12" height="8" rx="1.5" fill="currentColor"/>';

function privacyGlyph(value: string): { svg: string; description: string } {
  switch (value) {
    case 'not gathered':
      return {
        description: 'Personal data is not gathered',
        svg: svgWrap(
          LOCK_BODY +
            '<path d="M6.5 9V6.5a3.5 3.5 0 0 1 7 0V9" fill="none" stroke="currentColor" stroke-width="2"/>',
          'closed lock: personal data not gathered',
        ),
      };
    case 'may be stored':
      return {
        description: 'Personal data may be stored and used in this system',
        svg: svgWrap(
          LOCK_BODY +
            '<path d="M6.5 9V6.5a3.5 3.5 0 0 1 7 0" fill="none" stroke="currentColor" stroke-width="2"/>',
          'open lock: personal data may be stored',
        ),
      };
    default:
      return {
        description: 'Personal data may be stored, exploited, and distributed to third parties',
        svg: svgWrap(
          '<rect x="2" y="9" width="10" height="8" rx="1.5" fill="currentColor"/>' +
            '<path d="M4.5 9V6.5a3.5 3.5 0 0 1 7 0" fill="none" stroke="currentColor" stroke-width="2"/>' +
            '<path d="M13 11h5m0 0-2-2m2 2-2 2M13 15h5m0 0-2-2m2 2-2 2" fill="none" stroke="currentColor" stroke-width="1.5"/>',
          'open lock with outgoing data: personal data may be exploited',
        ),
      };
  }
}

function codeDataGlyph(value: string): { svg: string; description: string } {
  const dataBox = (filled: boolean) =>
    `<rect x="2" y="5" width="6" height="10" rx="1" fill="${filled ? 'currentColor' : 'none'}" stroke="currentColor" stroke-width="1.5"/>`;
  const codeBox = (filled: boolean) =>
    `<rect x="12" y="5" width="6" height="10" rx="1" fill="${filled ? 'currentColor' : 'none'}" stroke="currentColor" stroke-width="1.5"/>`;
  const arrow = '<path d="M8.5 10h3" stroke="currentColor" stroke-width="1.5"/>';
  switch (value) {
    case 'open':
      return {
        description: 'Code, models, and training data are available',
        svg: svgWrap(dataBox(false) + arrow + codeBox(false), 'white data box feeding white code box: open'),
      };
    case 'public':
      return {
        description: 'Code is available; training data is not',
        svg: svgWrap(dataBox(true) + arrow + codeBox(false), 'black data box feeding white code box: public'),
      };
    case 'no AI':
      return {
        description: 'This system runs no AI services',
        svg: svgWrap(
          '<circle cx="10" cy="10" r="7.5" fill="none" stroke="currentColor" stroke-width="1.5"/>' +
            '<path d="M5 15 15 5" stroke="currentColor" stroke-width="1.5"/>',
          'crossed circle: no AI services',
        ),
      };
    default:
      return {
        description: 'Source code of one or more AI services is not available',
        svg: svgWrap(dataBox(true) + arrow + codeBox(true), 'black data box feeding black code box: opaque'),
      };
  }
}

function objectivityGlyph(value: string): { svg: string; description: string } {
  if (value === 'indistinct') {
    return {
      description: 'Output does not depend on who you are',
      svg: svgWrap(
        '<circle cx="10" cy="10" r="7.5" fill="none" stroke="currentColor" stroke-width="1.5"/>' +
          '<text x="10" y="14" text-anchor="middle" font-size="10" fill="currentColor">i</text>',
        'information sign: indistinct output',
      ),
    };
  }
  return {
    description: 'Output may be personalised to your identity or behaviour',
    svg: svgWrap(
      '<circle cx="10" cy="10" r="7.5" fill="none" stroke="currentColor" stroke-width="1.5"/>' +
        '<circle cx="10" cy="10" r="4" fill="none" stroke="currentColor" stroke-width="1.5"/>' +
        '<circle cx="10" cy="10" r="1.5" fill="currentColor"/>',
      'target sign: personalised output',
    ),
  };
}

export function signGlyphs(signs: SignValues, hasAiServices: boolean): Glyph[] {
  const codeValue = hasAiServices ? signs.code_data : 'no AI';
  const privacy = privacyGlyph(signs.privacy);
  const codeData = codeDataGlyph(codeValue);
  const objectivity = objectivityGlyph(signs.objectivity);
  return [
    { axis: 'privacy', value: signs.privacy, label: signs.privacy, ...privacy },
    { axis: 'code_data', value: codeValue, label: codeValue, ...codeData },
    { axis: 'objectivity', value: signs.objectivity, label: signs.objectivity, ...objectivity },
  ];
}

export function renderGlyph(glyph: Glyph): string {
  return (
    `<span class="glyph glyph-${glyph.axis}" title="${glyph.description}">` +
    `${glyph.svg}<span class="glyph-label">${glyph.label}</span></span>`
  );
}
