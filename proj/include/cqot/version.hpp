#pragma once

#define CQOT_VERSION_MAJOR 0
#define CQOT_VERSION_MINOR 1
#define CQOT_VERSION_PATCH 0
#define CQOT_VERSION_STRING "0.1.0"
