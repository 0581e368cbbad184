#pragma once

#define BRATTELI_VERSION "0.1.0"
