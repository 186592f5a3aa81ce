#pragma once

#define BTERM_VERSION "0.1.0"
