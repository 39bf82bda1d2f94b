/** Locally bundled base map: coarse coastline outlines plus simplified US
 * state lines, as lon/lat polylines. Decorative orientation aid only; the
 * app works entirely offline. */

export type Polyline = Array<[number, number]>; // [lon, lat]

const NORTH_AMERICA: Polyline = [
  [-168, 65], [-166, 60], [-158, 58], [-153, 57], [-145, 60], [-135, 57],
  [-130, 52], [-125, 48], [-124, 40], [-117, 33], [-110, 28], [-105, 22],
  [-97, 16], [-92, 15], [-87, 13], [-83, 9], [-78, 7], [-77, 9], [-82, 14],
  [-87, 17], [-90, 21], [-87, 22], [-84, 23], [-81, 25], [-80, 27], [-81, 31],
  [-76, 35], [-74, 40], [-70, 42], [-66, 45], [-60, 47], [-56, 50], [-60, 55],
  [-66, 60], [-73, 62], [-78, 63], [-85, 66], [-95, 69], [-105, 70], [-115, 70],
  [-125, 70], [-135, 69], [-145, 70], [-155, 71], [-163, 69], [-168, 65],
];

const SOUTH_AMERICA: Polyline = [
  [-77, 7], [-75, 2], [-79, -3], [-81, -6], [-77, -12], [-72, -18], [-70, -23],
  [-71, -30], [-73, -37], [-74, -44], [-73, -50], [-69, -54], [-65, -55],
  [-62, -51], [-62, -45], [-57, -39], [-53, -34], [-48, -28], [-41, -23],
  [-35, -10], [-43, -3], [-50, 0], [-55, 5], [-61, 8], [-67, 10], [-72, 11],
  [-77, 7],
];

const AFRICA: Polyline = [
  [-6, 35], [-10, 31], [-15, 24], [-17, 17], [-16, 12], [-12, 8], [-6, 5],
  [3, 6], [9, 4], [9, -1], [13, -6], [12, -14], [15, -22], [18, -30],
  [20, -34], [27, -33], [32, -28], [35, -22], [40, -15], [40, -8], [43, -2],
  [49, 6], [51, 11], [45, 11], [40, 15], [37, 20], [33, 27], [31, 31],
  [22, 32], [15, 33], [10, 36], [2, 36], [-6, 35],
];

const EURASIA: Polyline = [
  [-9, 37], [-9, 43], [-2, 48], [0, 49], [4, 51], [8, 54], [8, 57], [12, 56],
  [18, 56], [22, 59], [28, 60], [25, 65], [20, 69], [28, 71], [40, 67],
  [45, 68], [55, 69], [70, 67], [80, 70], [95, 76], [110, 77], [125, 73],
  [140, 72], [155, 70], [170, 67], [178, 65], [175, 62], [162, 58], [160, 53],
  [150, 59], [142, 54], [135, 44], [129, 40], [126, 35], [122, 30], [114, 22],
  [108, 16], [105, 10], [103, 2], [101, 5], [98, 10], [94, 16], [88, 21],
  [80, 15], [77, 8], [73, 16], [68, 22], [66, 25], [57, 26], [52, 25],
  [48, 28], [43, 17], [43, 13], [36, 28], [33, 31], [27, 37], [22, 37],
  [15, 38], [10, 38], [5, 40], [0, 39], [-5, 36], [-9, 37],
];

const AUSTRALIA: Polyline = [
  [114, -22], [113, -26], [116, -32], [119, -34], [124, -33], [130, -32],
  [134, -33], [138, -35], [141, -38], [147, -39], [150, -37], [153, -32],
  [153, -27], [150, -22], [146, -18], [142, -13], [137, -12], [132, -11],
  [127, -14], [121, -17], [114, -22],
];

const GREENLAND: Polyline = [
  [-45, 60], [-52, 63], [-54, 67], [-53, 71], [-56, 75], [-61, 77], [-50, 80],
  [-38, 82], [-25, 82], [-20, 79], [-22, 74], [-25, 70], [-33, 67], [-40, 63],
  [-45, 60],
];

const ANTARCTICA: Polyline = [
  [-180, -78], [-150, -77], [-120, -74], [-90, -73], [-60, -74], [-30, -71],
  [0, -70], [30, -69], [60, -67], [90, -66], [120, -67], [150, -70], [180, -78],
];

// Simplified western-state borders (conveniently straight) and the 49th parallel.
const US_STATE_LINES: Polyline[] = [
  [[-125, 49], [-95, 49]],                    // northern border, western half
  [[-120, 42], [-114, 42]],                   // OR/CA-NV
  [[-124.2, 42], [-120, 42]],
  [[-120, 39], [-114.6, 35]],                 // CA/NV diagonal
  [[-114, 42], [-114, 37]],                   // NV/UT
  [[-109, 41], [-109, 31.3]],                 // AZ-NM line
  [[-111, 45], [-111, 41]],                   // MT/WY-ID
  [[-104, 45], [-104, 41]],                   // WY east
  [[-102, 40], [-102, 37]],                   // CO/KS
  [[-100, 49], [-100, 45.9]],                 // ND mid
  [[-97, 43], [-90, 43]],                     // SD/IA-ish parallel
  [[-103, 37], [-94.6, 37]],                  // KS/OK
];

export const BASEMAP: { outlines: Polyline[]; stateLines: Polyline[] } = {
  outlines: [
    NORTH_AMERICA,
    SOUTH_AMERICA,
    AFRICA,
    EURASIA,
    AUSTRALIA,
    GREENLAND,
    ANTARCTICA,
  ],
  stateLines: US_STATE_LINES,
};
