#pragma once

#define CARBCAST_VERSION_MAJOR 0
#define CARBCAST_VERSION_MINOR 1
#define CARBCAST_VERSION_PATCH 0
#define CARBCAST_VERSION "0.1.0"
