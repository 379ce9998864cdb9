// Literal plant matrices typed in independently of src/models.cpp.
#pragma once

#include "vtolctrl/linalg.hpp"

namespace reference {

inline const vtolctrl::Matrix kLevelA{{0, 0, 0, 1},
                                      {0, 0.0002, -0.0235, -0.1360},
                                      {0, 0.0011, -0.1793, 20.4845},
                                      {0, 0.0135, -2.1745, -3.2657}};
inline const vtolctrl::Matrix kLevelBu{{0}, {0.0009}, {-0.0407}, {-0.6544}};
inline const vtolctrl::Matrix kLevelBw{{0}, {0}, {0}, {1}};

inline const vtolctrl::Matrix kHoverA{{0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 1},
                                      {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}};
inline const vtolctrl::Matrix kHoverBu{{0, 0, 0, 0},
                                       {0, 0, 0, 0},
                                       {0, 0, 0, 0},
                                       {-153.5, 153.5, 153.5, -153.5},
                                       {36.9, -37.1, 36.9, -37.1},
                                       {-1.8, -1.8, 1.8, 1.8}};
inline const vtolctrl::Matrix kHoverBw{{0}, {0}, {0}, {1}, {1}, {1}};

} // namespace reference
